#pragma once

// Feature selection, class-conditional densities and the posterior-vector
// transform.

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gazeintent/distributions.hpp"
#include "gazeintent/features.hpp"

namespace gazeintent {

/// Rows carry a True/False label and a condition.
using LabeledFeatureTable = std::vector<ObservationVector>;

struct IqrResult {
  std::vector<double> kept;
  /// Set when fewer than 4 samples made the fences meaningless; samples pass through.
  bool warning = false;
};

/// Type-7 quartile (linear interpolation between order statistics).
double quantile_linear(std::span<const double> sorted, double p);

/// Drops samples outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR], keeping input order.
IqrResult iqr_filter(std::span<const double> samples);

struct WelchResult {
  double t = 0;
  double p_value = 1;
  /// (mean_a - mean_b) / pooled sd.
  double cohens_d = 0;
};

/// Two-sided Welch test. Throws kDegenerateTest when a group has fewer than 2
/// samples or both groups have zero variance.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct FeatureSelection {
  std::vector<Feature> features;
  /// Number of conditions with p < alpha, per feature.
  std::array<int, kFeatureCount> significant_conditions{};
};

/// Features significant in at least min_conditions of the 8 conditions, in
/// canonical order. Throws kIncompleteData when a condition or class is missing.
FeatureSelection select_features(const LabeledFeatureTable& table, double alpha = 0.05,
                                 int min_conditions = 6);

/// Values of one feature for one condition and label, absent slots skipped.
std::vector<double> column(const LabeledFeatureTable& table, Feature f, const Condition& c,
                           Label label);

inline constexpr double kDensityFloor = 1e-300;

struct DensityPair {
  Feature feature = Feature::kFix1Duration;
  FittedDistribution true_density;
  FittedDistribution false_density;
  /// Uniform density used in both halves when the observation is absent.
  Support fallback;
  /// Set when too few rows forced a uniform fit.
  bool warning = false;

  friend bool operator==(const DensityPair&, const DensityPair&) = default;
};

struct BayesianModel {
  Condition condition;
  std::vector<DensityPair> densities;
  CoeffKNorm coeffk_norm;
  double density_floor = kDensityFloor;

  std::size_t size() const { return densities.size(); }
  std::vector<Feature> selected_features() const;
  /// Throws kConfiguration on an empty model or inconsistent densities.
  void validate() const;
  friend bool operator==(const BayesianModel&, const BayesianModel&) = default;
};

/// Fits each feature per class after IQR filtering. Features with fewer than
/// 8 rows in a class fall back to a uniform over the observed range.
BayesianModel build_bayes_model(const LabeledFeatureTable& table, const Condition& condition,
                                std::span<const Feature> features,
                                const CoeffKNorm& norm = {});

/// Layout: (F_T(o_1) .. F_T(o_M), F_F(o_1) .. F_F(o_M)).
using PosteriorVector = Eigen::VectorXd;

/// Throws kInvalidObservation on a non-finite feature value.
PosteriorVector posterior_vector(const BayesianModel& model, const ObservationVector& obs);
void posterior_vector(const BayesianModel& model, const ObservationVector& obs,
                      Eigen::Ref<Eigen::VectorXd> out);

/// Density of one half of a pair, uniform fallback for absent values.
double feature_density(const DensityPair& pair, const std::optional<double>& value, bool true_half);

/// Sum of floored log-densities per class; ties go to False.
Label naive_argmax(const BayesianModel& model, const ObservationVector& obs);

}  // namespace gazeintent
