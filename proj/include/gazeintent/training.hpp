#pragma once

// Classifier inputs, dataset sampling, cross-validation and feature-group ablation.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gazeintent/bayes_model.hpp"
#include "gazeintent/metrics.hpp"
#include "gazeintent/svm.hpp"

namespace gazeintent {

enum class FeatureMask { kAll, kNo1stFixation, kNo2ndFixation, kNoSaccade, kObservationData };

std::span<const FeatureMask> all_masks();
std::string_view mask_name(FeatureMask mask);
/// Throws kUnknownMask.
FeatureMask parse_mask(std::string_view name);

/// Coefficient K is kept by every mask; group masks drop their whole group.
bool mask_keeps(FeatureMask mask, Feature f);
/// ObservationData feeds raw feature values; every other mask feeds densities.
bool uses_posterior(FeatureMask mask);

/// Maps windows to classifier input for one Bayes model and mask. Posterior
/// inputs are laid out (F_T of kept features, F_F of kept features); raw
/// inputs carry NaN for absent values, which the SVM scaler imputes.
class Encoder {
 public:
  Encoder(const BayesianModel& model, FeatureMask mask);

  Eigen::Index dim() const { return static_cast<Eigen::Index>(uses_posterior(mask_) ? 2 * slots_.size() : slots_.size()); }
  FeatureMask mask() const { return mask_; }
  void encode(const ObservationVector& obs, Eigen::Ref<Eigen::VectorXd> out) const;
  Eigen::VectorXd encode(const ObservationVector& obs) const;
  Eigen::MatrixXd encode_rows(std::span<const ObservationVector> rows) const;

 private:
  const BayesianModel* model_;
  FeatureMask mask_;
  std::vector<std::size_t> slots_;
};

/// Bayes transform plus SVM: the deployable classifier.
struct IntentModel {
  BayesianModel bayes;
  FeatureMask mask = FeatureMask::kAll;
  TrainedSVM svm;

  friend bool operator==(const IntentModel&, const IntentModel&) = default;
};

/// Encodes and classifies one window; decision_value > 0 means Select.
Prediction classify(const IntentModel& model, const ObservationVector& obs);

/// Label vector with +1 for True rows; throws kIncompleteData on unlabeled rows.
Eigen::VectorXd labels_of(std::span<const ObservationVector> rows);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Keeps every True row and ratio_false/ratio_true as many False rows drawn
/// without replacement, then splits each class by floor(6/10 n), floor(2/10 n)
/// and the rest. Throws kInsufficientRows naming the deficit.
SplitIndices sample_and_split(const std::vector<bool>& is_true, std::uint64_t seed,
                              int ratio_true = 1, int ratio_false = 3,
                              std::array<int, 3> split = {6, 2, 2});

/// Stratified fold index per row, classes dealt round-robin after a seeded shuffle.
std::vector<std::size_t> stratified_folds(const Eigen::VectorXd& y, std::size_t k, std::uint64_t seed);

struct GridCell {
  double sigma = 0;
  double c = 0;
  double mean_accuracy = 0;
  std::vector<double> fold_accuracy;
};

struct GridResult {
  double sigma = 0;
  double c = 0;
  std::vector<GridCell> cells;
  std::vector<std::size_t> fold_of;
};

/// Mean k-fold validation accuracy per (sigma, C); ties go to smaller C, then
/// smaller sigma. Throws kEmptyGrid, or kInsufficientRows when n < 5 k.
GridResult cross_validate_grid(const Dataset& data, std::span<const double> sigma_grid,
                               std::span<const double> c_grid, std::size_t k, std::uint64_t seed,
                               const SmoOptions& base = {});

/// Metrics on a labeled test set; latency is wall-clock per encode+predict.
Metrics evaluate(const IntentModel& model, std::span<const ObservationVector> test,
                 bool with_timing = true);

struct TrainOptions {
  SmoOptions smo;
  std::vector<double> sigma_grid;
  std::vector<double> c_grid;
  std::size_t folds = 5;
};

/// Builds the Bayes model on train rows, encodes them and trains the SVM.
/// A grid with more than one cell is first searched by k-fold
/// cross-validation over the train and validation rows together.
IntentModel train_intent_model(std::span<const ObservationVector> train,
                               std::span<const ObservationVector> val, const Condition& condition,
                               std::span<const Feature> features, FeatureMask mask,
                               const TrainOptions& options, std::uint64_t seed,
                               GridResult* grid = nullptr);

struct AblationRow {
  FeatureMask mask = FeatureMask::kAll;
  Metrics metrics;
  std::size_t support_vectors = 0;
};

/// Splits once, fits the Bayes model on the train split only, then trains
/// and tests one SVM per mask on the same partitions.
std::vector<AblationRow> ablation_run(std::span<const ObservationVector> rows,
                                      const Condition& condition, std::span<const Feature> features,
                                      std::span<const FeatureMask> masks, const TrainOptions& options,
                                      std::uint64_t seed);

}  // namespace gazeintent
