#pragma once

// Classification metrics and latency summaries.

#include <optional>
#include <span>
#include <vector>

namespace gazeintent {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  double accuracy() const;
  /// 2 TP / (2 TP + FP + FN); 0 when the denominator is 0.
  double f1() const;
};

Confusion confusion(const std::vector<bool>& truth, const std::vector<bool>& predicted);

/// Area under the ROC curve from the sorted score sweep, trapezoids over
/// tied-score blocks. Absent when either class is missing.
std::optional<double> auc_roc(std::span<const double> scores, const std::vector<bool>& truth);

struct LatencySummary {
  double mean_us = 0;
  double p99_us = 0;
  double max_us = 0;
};

/// Nearest-rank p99. Empty input gives zeros.
LatencySummary summarize_latency(std::span<const double> micros);

struct Metrics {
  Confusion counts;
  double accuracy = 0;
  double f1 = 0;
  std::optional<double> auc;
  LatencySummary latency;
};

Metrics compute_metrics(std::span<const double> scores, const std::vector<bool>& truth,
                        std::span<const double> latencies_us = {});

}  // namespace gazeintent
