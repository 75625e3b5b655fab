#include <algorithm>
#include <cmath>
#include <string>

#include "gazeintent/synth.hpp"

namespace gazeintent {
namespace {

FittedDistribution N(double mean, double var) { return make_distribution(Family::kNormal, mean, var); }
FittedDistribution G(double k, double s) { return make_distribution(Family::kGamma, k, s); }
FittedDistribution W(double k, double l) { return make_distribution(Family::kWeibull, k, l); }
FittedDistribution LN(double mu, double s) { return make_distribution(Family::kLogNormal, mu, s); }
FittedDistribution L(double mu, double s) { return make_distribution(Family::kLogistic, mu, s); }
FittedDistribution GZ(double eta, double b) { return make_distribution(Family::kGompertz, eta, b); }
FittedDistribution E(double rate) { return make_distribution(Family::kExponential, rate); }
FittedDistribution BP(double a, double b) { return make_distribution(Family::kBetaPrime, a, b); }
FittedDistribution GU(double mu, double beta) { return make_distribution(Family::kGumbel, mu, beta); }
FittedDistribution C(double x0, double g) { return make_distribution(Family::kCauchy, x0, g); }
FittedDistribution U(double lo, double hi) { return make_uniform(lo, hi); }

using Column = std::array<ClassDensities, 8>;

// Rows ordered simple-large-dense, simple-large-wide, simple-small-dense,
// simple-small-wide, then the same for complex.
Column fix1_velocity() {
  return {{{W(1.397, 0.014), G(2.311, 0.006)},
           {W(2.22, 0.034), W(1.844, 0.03)},
           {W(1.492, 0.015), LN(-4.527, 0.753)},
           {N(0.032, 2.096e-4), W(1.727, 0.029)},
           {G(2.661, 0.004), N(0.013, 4.576e-5)},
           {W(2.191, 0.02), N(0.022, 1.024e-4)},
           {G(2.825, 0.004), N(0.013, 4.617e-5)},
           {W(1.838, 0.022), N(0.023, 1.092e-4)}}};
}

Column fix1_std_x() {
  return {{{GZ(0.958, 2.647), W(1.441, 0.324)},
           {W(1.675, 0.482), W(1.508, 0.436)},
           {GZ(1.054, 2.464), W(1.522, 0.308)},
           {GZ(0.49, 2.094), GZ(0.658, 2.221)},
           {W(1.432, 0.3), N(0.294, 0.035)},
           {W(1.543, 0.426), N(0.411, 0.055)},
           {W(1.487, 0.308), N(0.3, 0.035)},
           {W(1.396, 0.422), N(0.421, 0.054)}}};
}

Column fix1_std_y() {
  return {{{N(0.194, 0.016), W(1.547, 0.271)},
           {W(1.656, 0.345), GZ(0.628, 2.822)},
           {GZ(0.96, 2.822), W(1.529, 0.26)},
           {GZ(0.623, 2.497), GZ(0.551, 2.903)},
           {W(1.45, 0.232), N(0.229, 0.022)},
           {W(1.625, 0.298), N(0.295, 0.031)},
           {W(1.5, 0.243), N(0.244, 0.024)},
           {W(1.302, 0.261), N(0.286, 0.03)}}};
}

Column fix2_velocity() {
  return {{{LN(-4.636, 0.711), N(0.019, 1.491e-4)},
           {G(3.652, 0.007), W(1.933, 0.033)},
           {LN(-4.472, 0.576), L(0.019, 0.008)},
           {W(2.304, 0.026), W(1.938, 0.033)},
           {G(3.182, 0.004), N(0.011, 5.443e-5)},
           {G(4.07, 0.004), N(0.021, 1.267e-4)},
           {LN(-4.622, 0.541), N(0.011, 5.546e-5)},
           {G(3.999, 0.004), N(0.022, 1.350e-4)}}};
}

// Simple-task cells had no acceptable fit; their uniform ranges keep True
// fixations longer than False ones, as in the complex-task fits.
Column fix2_duration() {
  const ClassDensities simple{U(160.0, 620.0), U(80.0, 380.0)};
  return {{simple,
           simple,
           simple,
           simple,
           {G(1.541, 164.248), N(184.752, 8117.234)},
           {W(1.131, 214.845), N(147.648, 7237.248)},
           {W(1.373, 352.295), N(207.833, 11236.47)},
           {G(1.342, 182.328), N(152.983, 8792.361)}}};
}

Column fix2_std_y() {
  return {{{G(2.116, 0.115), W(1.178, 0.218)},
           {W(1.668, 0.455), GZ(0.703, 2.703)},
           {G(2.467, 0.125), W(1.103, 0.199)},
           {W(1.606, 0.483), GZ(0.608, 2.775)},
           {G(2.049, 0.128), N(0.227, 0.021)},
           {W(1.605, 0.333), N(0.294, 0.031)},
           {G(2.046, 0.144), N(0.242, 0.024)},
           {W(1.715, 0.357), N(0.285, 0.03)}}};
}

Column sac_amplitude_head() {
  return {{{LN(-2.692, 1.169), LN(-2.319, 1.371)},
           {BP(1.186, 3.018), W(0.883, 0.611)},
           {LN(-2.145, 1.206), LN(-2.085, 1.32)},
           {LN(-1.428, 1.12), W(0.852, 0.658)},
           {LN(-2.752, 1.111), N(0.164, 0.024)},
           {LN(-1.814, 1.054), N(0.557, 0.231)},
           {LN(-2.726, 1.007), N(0.157, 0.022)},
           {G(1.289, 0.161), N(0.509, 0.194)}}};
}

// The simple-large-dense cell had no acceptable fit; False is faster there.
Column sac_velocity_head() {
  return {{{U(0.002, 0.04), U(0.004, 0.06)},
           {G(1.247, 0.02), GZ(2.672, 9.941)},
           {E(94.545), W(0.926, 0.013)},
           {G(1.421, 0.014), GZ(2.471, 9.77)},
           {LN(-5.792, 1.104), N(0.008, 0.00005006)},
           {LN(-4.956, 0.933), N(0.024, 0.0002715)},
           {LN(-5.737, 0.983), N(0.008, 0.0000516)},
           {W(1.287, 0.012), N(0.024, 0.0002649)}}};
}

Column coefficient_k_column() {
  return {{{L(0.221, 0.657), L(0.571, 0.619)},
           {GU(0.66, 0.895), C(0.625, 0.57)},
           {L(0.322, 0.637), L(0.627, 0.645)},
           {L(0.992, 0.448), C(0.6, 0.621)},
           {L(0.444, 0.73), N(0.37, 1.388)},
           {L(0.57, 0.725), N(0.518, 1.433)},
           {L(0.193, 0.581), N(0.383, 1.292)},
           {L(0.484, 0.653), N(0.569, 1.397)}}};
}

void set_column(GenerativeSpec& spec, Feature f, const Column& column) {
  for (std::size_t c = 0; c < 8; ++c) spec.cells[c][index_of(f)] = column[c];
}

}  // namespace

void GenerativeSpec::validate() const {
  if (!(class_imbalance > 0)) throw Error(ErrorCode::kSpec, "class_imbalance must be positive");
  coeffk_norm.validate();
  for (const Condition& c : all_conditions()) {
    for (Feature f : all_features()) {
      const ClassDensities& d = at(c, f);
      try {
        gazeintent::validate(d.true_density);
        gazeintent::validate(d.false_density);
      } catch (const Error& e) {
        throw Error(ErrorCode::kSpec, to_string(c) + "/" + std::string(feature_name(f)) + ": " + e.what());
      }
    }
  }
}

GenerativeSpec default_generative_spec() {
  GenerativeSpec spec;
  const ClassDensities unit{U(0.0, 1.0), U(0.0, 1.0)};
  for (auto& row : spec.cells) row.fill(unit);
  set_column(spec, Feature::kFix1Velocity, fix1_velocity());
  set_column(spec, Feature::kFix1StdX, fix1_std_x());
  set_column(spec, Feature::kFix1StdY, fix1_std_y());
  set_column(spec, Feature::kFix2Velocity, fix2_velocity());
  set_column(spec, Feature::kFix2Duration, fix2_duration());
  set_column(spec, Feature::kFix2StdY, fix2_std_y());
  set_column(spec, Feature::kSacAmplitudeHead, sac_amplitude_head());
  set_column(spec, Feature::kSacVelocityHead, sac_velocity_head());
  set_column(spec, Feature::kCoefficientK, coefficient_k_column());
  return spec;
}

std::vector<Feature> published_feature_selection() {
  return {Feature::kFix1StdX,         Feature::kFix1StdY,         Feature::kFix1Velocity,
          Feature::kFix2Duration,     Feature::kFix2StdX,         Feature::kFix2StdY,
          Feature::kFix2Velocity,     Feature::kSacAmplitudeHead, Feature::kSacAmplitudeGaze,
          Feature::kSacVelocityEye,   Feature::kSacVelocityHead,  Feature::kCoefficientK};
}

bool has_fitted_table(Feature f) {
  switch (f) {
    case Feature::kFix1Velocity:
    case Feature::kFix1StdX:
    case Feature::kFix1StdY:
    case Feature::kFix2Velocity:
    case Feature::kFix2Duration:
    case Feature::kFix2StdY:
    case Feature::kSacAmplitudeHead:
    case Feature::kSacVelocityHead:
    case Feature::kCoefficientK:
      return true;
    default:
      return false;
  }
}

LabeledFeatureTable gen_features(const GenerativeSpec& spec, const Condition& condition,
                                 std::size_t n_true, std::size_t n_false, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  LabeledFeatureTable table;
  table.reserve(n_true + n_false);
  for (std::size_t i = 0; i < n_true + n_false; ++i) {
    ObservationVector row;
    row.condition = condition;
    row.label = i < n_true ? Label::kTrue : Label::kFalse;
    for (Feature f : all_features()) {
      const ClassDensities& d = spec.at(condition, f);
      row[f] = sample(row.label == Label::kTrue ? d.true_density : d.false_density, rng);
    }
    table.push_back(row);
  }
  return table;
}

BayesianModel spec_model(const GenerativeSpec& spec, const Condition& condition,
                         std::span<const Feature> features) {
  BayesianModel model;
  model.condition = condition;
  model.coeffk_norm = spec.coeffk_norm;
  for (Feature f : features) {
    const ClassDensities& d = spec.at(condition, f);
    DensityPair pair;
    pair.feature = f;
    pair.true_density = d.true_density;
    pair.false_density = d.false_density;
    pair.fallback = {std::min(quantile(d.true_density, 0.001), quantile(d.false_density, 0.001)),
                     std::max(quantile(d.true_density, 0.999), quantile(d.false_density, 0.999))};
    model.densities.push_back(pair);
  }
  model.validate();
  return model;
}

namespace {

double log_likelihood_ratio(const GenerativeSpec& spec, const Condition& condition,
                            const ObservationVector& row) {
  double llr = 0.0;
  for (Feature f : all_features()) {
    const ClassDensities& d = spec.at(condition, f);
    const double x = *row[f];
    llr += std::log(std::max(pdf(d.true_density, x), kDensityFloor)) -
           std::log(std::max(pdf(d.false_density, x), kDensityFloor));
  }
  return llr;
}

}  // namespace

double bayes_optimal_rate(const GenerativeSpec& spec, const Condition& condition, std::size_t n_mc,
                          std::uint64_t seed) {
  spec.validate();
  if (n_mc == 0) throw Error(ErrorCode::kSpec, "n_mc must be positive");
  const double p_true = 1.0 / (1.0 + spec.class_imbalance);
  const double log_prior = std::log(p_true / (1.0 - p_true));
  Rng rng(seed);
  std::size_t correct = 0;
  ObservationVector row;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const bool is_true = rng.uniform() < p_true;
    for (Feature f : all_features()) {
      const ClassDensities& d = spec.at(condition, f);
      row[f] = sample(is_true ? d.true_density : d.false_density, rng);
    }
    const bool decide_true = log_likelihood_ratio(spec, condition, row) + log_prior > 0;
    if (decide_true == is_true) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n_mc);
}

double bayes_optimal_rate_smoothed(const GenerativeSpec& spec, const Condition& condition,
                                   std::size_t n_mc, std::uint64_t seed) {
  spec.validate();
  const double p_true = 1.0 / (1.0 + spec.class_imbalance);
  const auto n_true = static_cast<std::size_t>(std::llround(p_true * static_cast<double>(n_mc)));
  const LabeledFeatureTable rows = gen_features(spec, condition, n_true, n_mc - n_true, seed);
  const double log_prior = std::log(p_true / (1.0 - p_true));
  double sum = 0.0;
  for (const ObservationVector& row : rows) {
    const double z = log_likelihood_ratio(spec, condition, row) + log_prior;
    // max(p, 1 - p) for p = logistic(z).
    sum += 1.0 / (1.0 + std::exp(-std::abs(z)));
  }
  return sum / static_cast<double>(rows.size());
}

}  // namespace gazeintent
