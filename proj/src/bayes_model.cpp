#include "gazeintent/bayes_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gazeintent/special_functions.hpp"

namespace gazeintent {
namespace {

struct Moments {
  double mean = 0;
  double var = 0;  // unbiased
};

Moments moments(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return {m, ss / (n - 1.0)};
}

Support observed_range(std::span<const double> a, std::span<const double> b) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (auto s : {a, b}) {
    for (double v : s) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(lo <= hi)) return {0.0, 1.0};
  if (lo == hi) return {lo - 0.5, hi + 0.5};
  return {lo, hi};
}

FittedDistribution uniform_over(const Support& s) { return make_uniform(s.lo, s.hi); }

}  // namespace

double quantile_linear(std::span<const double> sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

IqrResult iqr_filter(std::span<const double> samples) {
  IqrResult r;
  if (samples.size() < 4) {
    r.kept.assign(samples.begin(), samples.end());
    r.warning = true;
    return r;
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double q1 = quantile_linear(sorted, 0.25);
  const double q3 = quantile_linear(sorted, 0.75);
  const double lo = q1 - 1.5 * (q3 - q1);
  const double hi = q3 + 1.5 * (q3 - q1);
  r.kept.reserve(samples.size());
  for (double v : samples) {
    if (v >= lo && v <= hi) r.kept.push_back(v);
  }
  return r;
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::kDegenerateTest, "Welch test needs at least 2 samples per group");
  }
  const Moments ma = moments(a);
  const Moments mb = moments(b);
  if (ma.var == 0.0 && mb.var == 0.0) {
    throw Error(ErrorCode::kDegenerateTest, "both groups have zero variance");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = ma.var / na;
  const double vb = mb.var / nb;
  const double se = std::sqrt(va + vb);
  const double t = (ma.mean - mb.mean) / se;
  const double dof = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  const double pooled = std::sqrt(((na - 1.0) * ma.var + (nb - 1.0) * mb.var) / (na + nb - 2.0));
  return {t, special::student_t_two_sided(t, dof), (ma.mean - mb.mean) / pooled};
}

std::vector<double> column(const LabeledFeatureTable& table, Feature f, const Condition& c,
                           Label label) {
  std::vector<double> out;
  for (const ObservationVector& row : table) {
    if (row.label == label && row.condition == c && row[f]) out.push_back(*row[f]);
  }
  return out;
}

FeatureSelection select_features(const LabeledFeatureTable& table, double alpha,
                                 int min_conditions) {
  std::array<std::array<bool, 2>, 8> present{};
  for (const ObservationVector& row : table) {
    if (row.label == Label::kUnlabeled) continue;
    present[index_of(row.condition)][row.label == Label::kTrue ? 0 : 1] = true;
  }
  for (const Condition& c : all_conditions()) {
    const auto& p = present[index_of(c)];
    if (!p[0] || !p[1]) {
      throw Error(ErrorCode::kIncompleteData, "no rows for both classes in " + to_string(c));
    }
  }

  FeatureSelection sel;
  for (Feature f : all_features()) {
    int count = 0;
    for (const Condition& c : all_conditions()) {
      const auto t = iqr_filter(column(table, f, c, Label::kTrue)).kept;
      const auto n = iqr_filter(column(table, f, c, Label::kFalse)).kept;
      try {
        if (welch_t_test(t, n).p_value < alpha) ++count;
      } catch (const Error&) {
        // Too few or constant values: no evidence in this condition.
      }
    }
    sel.significant_conditions[index_of(f)] = count;
    if (count >= min_conditions) sel.features.push_back(f);
  }
  return sel;
}

std::vector<Feature> BayesianModel::selected_features() const {
  std::vector<Feature> out;
  out.reserve(densities.size());
  for (const auto& d : densities) out.push_back(d.feature);
  return out;
}

void BayesianModel::validate() const {
  if (densities.empty()) throw Error(ErrorCode::kConfiguration, "model has no features");
  if (!(density_floor > 0)) throw Error(ErrorCode::kConfiguration, "density floor must be positive");
  coeffk_norm.validate();
  for (const auto& d : densities) {
    gazeintent::validate(d.true_density);
    gazeintent::validate(d.false_density);
    if (!(d.fallback.hi > d.fallback.lo)) {
      throw Error(ErrorCode::kConfiguration,
                  "empty fallback range for " + std::string(feature_name(d.feature)));
    }
  }
}

BayesianModel build_bayes_model(const LabeledFeatureTable& table, const Condition& condition,
                                std::span<const Feature> features, const CoeffKNorm& norm) {
  BayesianModel model;
  model.condition = condition;
  model.coeffk_norm = norm;
  for (Feature f : features) {
    const auto t = iqr_filter(column(table, f, condition, Label::kTrue)).kept;
    const auto n = iqr_filter(column(table, f, condition, Label::kFalse)).kept;
    DensityPair pair;
    pair.feature = f;
    pair.fallback = observed_range(t, n);
    if (t.size() < kMinFitSamples || n.size() < kMinFitSamples) {
      pair.true_density = uniform_over(pair.fallback);
      pair.false_density = pair.true_density;
      pair.warning = true;
    } else {
      pair.true_density = select_best_fit(t);
      pair.false_density = select_best_fit(n);
    }
    model.densities.push_back(pair);
  }
  model.validate();
  return model;
}

double feature_density(const DensityPair& pair, const std::optional<double>& value, bool true_half) {
  if (!value) return 1.0 / (pair.fallback.hi - pair.fallback.lo);
  if (!std::isfinite(*value)) {
    throw Error(ErrorCode::kInvalidObservation,
                "non-finite value for " + std::string(feature_name(pair.feature)));
  }
  const double p = pdf(true_half ? pair.true_density : pair.false_density, *value);
  return std::min(p, std::numeric_limits<double>::max());
}

void posterior_vector(const BayesianModel& model, const ObservationVector& obs,
                      Eigen::Ref<Eigen::VectorXd> out) {
  const auto m = static_cast<Eigen::Index>(model.size());
  if (out.size() != 2 * m) throw Error(ErrorCode::kDimensionMismatch, "posterior vector size");
  for (Eigen::Index i = 0; i < m; ++i) {
    const DensityPair& pair = model.densities[static_cast<std::size_t>(i)];
    const auto& value = obs[pair.feature];
    out(i) = feature_density(pair, value, true);
    out(m + i) = feature_density(pair, value, false);
  }
}

PosteriorVector posterior_vector(const BayesianModel& model, const ObservationVector& obs) {
  PosteriorVector v(2 * static_cast<Eigen::Index>(model.size()));
  posterior_vector(model, obs, v);
  return v;
}

Label naive_argmax(const BayesianModel& model, const ObservationVector& obs) {
  double lt = 0.0;
  double lf = 0.0;
  for (const DensityPair& pair : model.densities) {
    const auto& value = obs[pair.feature];
    lt += std::log(std::max(feature_density(pair, value, true), model.density_floor));
    lf += std::log(std::max(feature_density(pair, value, false), model.density_floor));
  }
  return lt > lf ? Label::kTrue : Label::kFalse;
}

}  // namespace gazeintent
