#include "gazeintent/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gazeintent/error.hpp"

namespace gazeintent {

double Confusion::accuracy() const {
  return total() ? static_cast<double>(tp + tn) / static_cast<double>(total()) : 0.0;
}

double Confusion::f1() const {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
}

Confusion confusion(const std::vector<bool>& truth, const std::vector<bool>& predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "truth and predictions differ in length");
  }
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) {
      predicted[i] ? ++c.tp : ++c.fn;
    } else {
      predicted[i] ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

std::optional<double> auc_roc(std::span<const double> scores, const std::vector<bool>& truth) {
  if (scores.size() != truth.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "scores and labels differ in length");
  }
  const auto n_pos = static_cast<double>(std::count(truth.begin(), truth.end(), true));
  const double n_neg = static_cast<double>(truth.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

  double area = 0.0;
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    double dtp = 0.0;
    double dfp = 0.0;
    const double s = scores[order[k]];
    for (; k < order.size() && scores[order[k]] == s; ++k) {
      truth[order[k]] ? ++dtp : ++dfp;
    }
    area += dfp * (tp + 0.5 * dtp);
    tp += dtp;
    fp += dfp;
  }
  return area / (n_pos * n_neg);
}

LatencySummary summarize_latency(std::span<const double> micros) {
  if (micros.empty()) return {};
  std::vector<double> sorted(micros.begin(), micros.end());
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(sorted.size())));
  LatencySummary s;
  s.mean_us = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
  s.p99_us = sorted[std::max<std::size_t>(rank, 1) - 1];
  s.max_us = sorted.back();
  return s;
}

Metrics compute_metrics(std::span<const double> scores, const std::vector<bool>& truth,
                        std::span<const double> latencies_us) {
  std::vector<bool> pred(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) pred[i] = scores[i] > 0;
  Metrics m;
  m.counts = confusion(truth, pred);
  m.accuracy = m.counts.accuracy();
  m.f1 = m.counts.f1();
  m.auc = auc_roc(scores, truth);
  m.latency = summarize_latency(latencies_us);
  return m;
}

}  // namespace gazeintent
