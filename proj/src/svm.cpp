#include "gazeintent/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gazeintent {
namespace {

constexpr double kTau = 1e-12;
constexpr double kFreeTolerance = 1e-12;
constexpr Eigen::Index kDenseKernelLimit = 8000;

/// Kernel rows, precomputed densely for small problems and recomputed on demand otherwise.
class KernelSource {
 public:
  KernelSource(const Eigen::MatrixXd& x, double sigma) : x_(x), sigma_(sigma) {
    if (x.rows() <= kDenseKernelLimit) dense_ = kernel_matrix(x, sigma);
    sq_ = x.rowwise().squaredNorm();
  }

  double operator()(Eigen::Index i, Eigen::Index j) const {
    if (dense_.size()) return dense_(i, j);
    return std::exp(-std::max(sq_(i) + sq_(j) - 2.0 * x_.row(i).dot(x_.row(j)), 0.0) /
                    (2.0 * sigma_ * sigma_));
  }

  Eigen::VectorXd column(Eigen::Index i) const {
    if (dense_.size()) return dense_.col(i);
    Eigen::VectorXd c = x_ * x_.row(i).transpose();
    for (Eigen::Index t = 0; t < c.size(); ++t) c(t) = (*this)(t, i);
    return c;
  }

  Eigen::VectorXd times(const Eigen::VectorXd& v) const {
    if (dense_.size()) return dense_ * v;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v(i) != 0.0) out += column(i) * v(i);
    }
    return out;
  }

 private:
  const Eigen::MatrixXd& x_;
  double sigma_;
  Eigen::MatrixXd dense_;
  Eigen::VectorXd sq_;
};

bool in_up(double y, double a, double c) { return y > 0 ? a < c : a > 0; }
bool in_low(double y, double a, double c) { return y > 0 ? a > 0 : a < c; }

}  // namespace

Scaler Scaler::fit(const Eigen::MatrixXd& x) {
  Scaler s;
  s.mean = Eigen::VectorXd::Zero(x.cols());
  s.scale = Eigen::VectorXd::Ones(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double sum = 0.0;
    Eigen::Index n = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (std::isnan(x(i, j))) continue;
      sum += x(i, j);
      ++n;
    }
    if (n == 0) continue;
    const double m = sum / static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (!std::isnan(x(i, j))) ss += (x(i, j) - m) * (x(i, j) - m);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    s.mean(j) = m;
    s.scale(j) = sd > 0 && std::isfinite(sd) ? sd : 1.0;
  }
  return s;
}

Scaler Scaler::identity(Eigen::Index dim) {
  return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

Eigen::VectorXd Scaler::apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd out = (x - mean).cwiseQuotient(scale);
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    if (std::isnan(out(j))) out(j) = 0.0;
  }
  return out;
}

Eigen::MatrixXd Scaler::apply_rows(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) = apply(x.row(i).transpose()).transpose();
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset d;
  d.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  d.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    d.x.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(rows[k]));
    d.y(static_cast<Eigen::Index>(k)) = y(static_cast<Eigen::Index>(rows[k]));
  }
  return d;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, double sigma) {
  const Eigen::Index n = x.rows();
  const Eigen::VectorXd sq = x.rowwise().squaredNorm();
  Eigen::MatrixXd k = x * x.transpose();
  const double inv = -1.0 / (2.0 * sigma * sigma);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      k(i, j) = std::exp(std::max(sq(i) + sq(j) - 2.0 * k(i, j), 0.0) * inv);
    }
  }
  return k;
}

double dual_objective(const Eigen::MatrixXd& scaled_x, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& alpha, double sigma) {
  const Eigen::MatrixXd k = kernel_matrix(scaled_x, sigma);
  const Eigen::VectorXd ay = alpha.cwiseProduct(y);
  return 0.5 * ay.dot(k * ay) - alpha.sum();
}

DualSolution train_smo_dual(const Dataset& data, const SmoOptions& options) {
  const Eigen::Index n = data.size();
  if (n == 0) throw Error(ErrorCode::kTraining, "empty training set");
  if (!(options.c > 0) || !(options.sigma > 0) || !(options.kkt_tol > 0)) {
    throw Error(ErrorCode::kParameterDomain, "C, sigma and kkt_tol must be positive");
  }
  const Eigen::Index n_pos = (data.y.array() > 0).count();
  if (n_pos == 0 || n_pos == n) throw Error(ErrorCode::kTraining, "training data has a single class");
  if (!data.x.allFinite()) {
    // NaN marks an absent value and is imputed by the scaler; infinities are rejected.
    for (Eigen::Index i = 0; i < data.x.size(); ++i) {
      if (std::isinf(data.x.data()[i])) throw Error(ErrorCode::kTraining, "non-finite feature");
    }
  }

  DualSolution sol;
  TrainedSVM& model = sol.model;
  model.sigma = options.sigma;
  model.c = options.c;
  model.scaler = options.standardize ? Scaler::fit(data.x) : Scaler::identity(data.dim());
  sol.scaled_x = model.scaler.apply_rows(data.x);

  const KernelSource k(sol.scaled_x, options.sigma);
  const Eigen::VectorXd& y = data.y;
  const double c = options.c;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);
  const auto rows = static_cast<std::size_t>(n);
  const std::size_t max_iter = (options.max_passes ? options.max_passes : 10 * rows) * rows;

  std::size_t iter = 0;
  double gap = 0.0;
  for (;; ++iter) {
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    Eigen::Index j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y(t) * grad(t);
      if (in_up(y(t), alpha(t), c) && v > m_up) {
        m_up = v;
        i = t;
      }
      if (in_low(y(t), alpha(t), c) && v < m_low) {
        m_low = v;
        j = t;
      }
    }
    gap = m_up - m_low;
    if (i < 0 || j < 0 || gap <= options.kkt_tol) break;
    if (iter >= max_iter) {
      throw Error(ErrorCode::kTraining, "SMO did not converge after " + std::to_string(iter) +
                                            " iterations; KKT gap " + std::to_string(gap));
    }

    const double ai_old = alpha(i);
    const double aj_old = alpha(j);
    const double qij = y(i) * y(j) * k(i, j);
    if (y(i) != y(j)) {
      double quad = k(i, i) + k(j, j) + 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) {
          alpha(j) = 0;
          alpha(i) = diff;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = -diff;
      }
      if (diff > 0) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = c - diff;
        }
      } else if (alpha(j) > c) {
        alpha(j) = c;
        alpha(i) = c + diff;
      }
    } else {
      double quad = k(i, i) + k(j, j) - 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = sum - c;
        }
      } else if (alpha(j) < 0) {
        alpha(j) = 0;
        alpha(i) = sum;
      }
      if (sum > c) {
        if (alpha(j) > c) {
          alpha(j) = c;
          alpha(i) = sum - c;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = sum;
      }
    }
    const double di = (alpha(i) - ai_old) * y(i);
    const double dj = (alpha(j) - aj_old) * y(j);
    grad.array() += y.array() * (k.column(i).array() * di + k.column(j).array() * dj);
  }

  // Bias from free vectors, else the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * grad(t);
    if (alpha(t) > kFreeTolerance && alpha(t) < c - kFreeTolerance) {
      sum_free += yg;
      ++n_free;
    } else if (alpha(t) <= kFreeTolerance) {
      if (y(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      if (y(t) > 0) lb = std::max(lb, yg); else ub = std::min(ub, yg);
    }
  }
  const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
  model.bias = -rho;

  Eigen::Index n_sv = (alpha.array() > 0).count();
  model.support_vectors.resize(n_sv, data.dim());
  model.coefficients.resize(n_sv);
  for (Eigen::Index t = 0, s = 0; t < n; ++t) {
    if (alpha(t) <= 0) continue;
    model.support_vectors.row(s) = sol.scaled_x.row(t);
    model.coefficients(s) = alpha(t) * y(t);
    ++s;
  }
  const Eigen::VectorXd ay = alpha.cwiseProduct(y);
  model.diagnostics = {iter, gap, 0.5 * ay.dot(k.times(ay)) - alpha.sum()};
  sol.alpha = std::move(alpha);
  return sol;
}

TrainedSVM train_smo(const Dataset& data, const SmoOptions& options) {
  return train_smo_dual(data, options).model;
}

double TrainedSVM::decision(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "input has " + std::to_string(x.size()) +
                                                   " dims, model expects " + std::to_string(dim()));
  }
  const Eigen::VectorXd z = scaler.apply(x);
  const double inv = -1.0 / (2.0 * sigma * sigma);
  double sum = bias;
  for (Eigen::Index s = 0; s < support_vectors.rows(); ++s) {
    sum += coefficients(s) * std::exp((support_vectors.row(s).transpose() - z).squaredNorm() * inv);
  }
  return sum;
}

Prediction predict(const TrainedSVM& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double d = model.decision(x);
  return {d > 0, d};
}

std::vector<Prediction> predict_batch(const TrainedSVM& model, const Eigen::MatrixXd& x) {
  std::vector<Prediction> out;
  out.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.push_back(predict(model, x.row(i).transpose()));
  return out;
}

}  // namespace gazeintent
