#pragma once

// Gaussian-kernel soft-margin SVM trained by SMO.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gazeintent/error.hpp"

namespace gazeintent {

/// exp(-|x - y|^2 / (2 sigma^2)).
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar gaussian_kernel(const Eigen::MatrixBase<DerivedX>& x,
                                          const Eigen::MatrixBase<DerivedY>& y,
                                          typename DerivedX::Scalar sigma) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size()) throw Error(ErrorCode::kDimensionMismatch, "kernel arguments differ in size");
  if (!(sigma > Scalar(0))) throw Error(ErrorCode::kParameterDomain, "kernel sigma must be positive");
  return std::exp(-(x - y).squaredNorm() / (Scalar(2) * sigma * sigma));
}

/// Per-dimension z-score; NaN inputs (absent values) map to 0 after scaling.
struct Scaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  /// Rows are samples. NaNs are ignored; constant columns get scale 1.
  static Scaler fit(const Eigen::MatrixXd& x);
  static Scaler identity(Eigen::Index dim);
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& x) const;
  friend bool operator==(const Scaler&, const Scaler&) = default;
};

/// Labeled data: one row per sample, y in {+1, -1} (+1 = True class).
struct Dataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;

  Eigen::Index size() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }
  Dataset subset(std::span<const std::size_t> rows) const;
};

struct SmoOptions {
  double c = 30.0;
  double sigma = 30.0;
  double kkt_tol = 1e-3;
  /// One pass is n working-set updates; 0 means 10 n passes.
  std::size_t max_passes = 0;
  bool standardize = true;
};

struct TrainDiagnostics {
  std::size_t iterations = 0;
  /// Maximal KKT violation m - M at termination.
  double kkt_gap = 0;
  double dual_objective = 0;
};

struct TrainedSVM {
  double sigma = 30.0;
  double c = 30.0;
  double bias = 0;
  Scaler scaler;
  /// Scaled support vectors, one per row.
  Eigen::MatrixXd support_vectors;
  /// alpha_i y_i per support vector.
  Eigen::VectorXd coefficients;
  TrainDiagnostics diagnostics;

  Eigen::Index dim() const { return support_vectors.cols(); }
  /// Sum of alpha_i y_i k(sv_i, x) + bias on the raw (unscaled) input.
  double decision(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  friend bool operator==(const TrainedSVM& a, const TrainedSVM& b) {
    return a.sigma == b.sigma && a.c == b.c && a.bias == b.bias && a.scaler == b.scaler &&
           a.support_vectors == b.support_vectors && a.coefficients == b.coefficients;
  }
};

struct Prediction {
  bool label = false;
  double decision_value = 0;
};

/// Throws kTraining for single-class data or when max_passes is exhausted
/// before the KKT gap falls below kkt_tol.
TrainedSVM train_smo(const Dataset& data, const SmoOptions& options = {});

/// Throws kDimensionMismatch when x does not match the model.
Prediction predict(const TrainedSVM& model, const Eigen::Ref<const Eigen::VectorXd>& x);
std::vector<Prediction> predict_batch(const TrainedSVM& model, const Eigen::MatrixXd& x);

/// Dual objective 0.5 a'Qa - sum(a) for a given alpha vector on scaled data.
double dual_objective(const Eigen::MatrixXd& scaled_x, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& alpha, double sigma);

/// Dense kernel matrix of the rows of x.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, double sigma);

/// Full dual solution alongside the trained model, for oracle comparisons.
struct DualSolution {
  TrainedSVM model;
  Eigen::VectorXd alpha;
  Eigen::MatrixXd scaled_x;
};
DualSolution train_smo_dual(const Dataset& data, const SmoOptions& options = {});

}  // namespace gazeintent
