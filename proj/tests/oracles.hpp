#pragma once
// Independent reference implementations used only as test oracles.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gazeintent/distributions.hpp"

namespace gazeintent::oracle {

// P(score_pos > score_neg) + 0.5 P(tie), over all pairs.
inline double pairwise_auc(std::span<const double> scores, const std::vector<bool>& truth) {
  double wins = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!truth[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (truth[j]) continue;
      pairs += 1;
      wins += scores[i] > scores[j] ? 1.0 : (scores[i] == scores[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

// Soft-margin dual by accelerated projected gradient on {0 <= a <= C, y'a = 0}.

// Euclidean projection onto the box intersected with the hyperplane y'a = 0.
// a(lambda) = clip(v - lambda y, 0, C) makes y'a(lambda) non-increasing in lambda.
inline Eigen::VectorXd project(const Eigen::VectorXd& v, const Eigen::VectorXd& y, double c) {
  auto at = [&](double lambda) {
    return (v - lambda * y).cwiseMax(0.0).cwiseMin(c).eval();
  };
  double lo = -(v.cwiseAbs().maxCoeff() + c) - 1;
  double hi = -lo;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (y.dot(at(mid)) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return at(0.5 * (lo + hi));
}

struct QpResult {
  Eigen::VectorXd alpha;
  double objective = 0;
};

inline double dual_value(const Eigen::MatrixXd& q, const Eigen::VectorXd& a) {
  return 0.5 * a.dot(q * a) - a.sum();
}

// k is the kernel matrix; the objective is 0.5 a'Qa - 1'a with Q = diag(y) K diag(y).
inline QpResult solve_dual_reference(const Eigen::MatrixXd& k, const Eigen::VectorXd& y, double c,
                                     int iterations = 20000) {
  const Eigen::MatrixXd q = y.asDiagonal() * k * y.asDiagonal();
  const double lipschitz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q).eigenvalues().maxCoeff();
  const double step = 1.0 / lipschitz;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(y.size());
  Eigen::VectorXd z = a;
  double t = 1.0;
  double best = dual_value(q, a);
  Eigen::VectorXd best_a = a;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd grad = q * z - Eigen::VectorXd::Ones(y.size());
    const Eigen::VectorXd next = project(z - step * grad, y, c);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = next + ((t - 1.0) / t_next) * (next - a);
    a = next;
    t = t_next;
    const double f = dual_value(q, a);
    if (f < best) {
      best = f;
      best_a = a;
    } else if (it % 500 == 0) {
      // Restart momentum when it stops paying off.
      z = a;
      t = 1.0;
    }
  }
  return {best_a, best};
}

// Densities written out term by term, one branch per family; zero off support.
inline double closed_form_pdf(const FittedDistribution& d, double x) {
  const double a = d.p1;
  const double b = d.p2;
  const double pi = 3.14159265358979323846;
  if (d.family == Family::kNoneUniform) return (x >= d.support.lo && x <= d.support.hi) ? 1.0 / (d.support.hi - d.support.lo) : 0.0;
  switch (d.family) {
    case Family::kNormal:
      return std::exp(-(x - a) * (x - a) / (2 * b)) / std::sqrt(2 * pi * b);
    case Family::kLogistic: {
      const double e = std::exp(-std::abs(x - a) / b);
      return e / (b * (1 + e) * (1 + e));
    }
    case Family::kGumbel: {
      const double z = (x - a) / b;
      return std::exp(-z - std::exp(-z)) / b;
    }
    case Family::kCauchy: {
      const double z = (x - a) / b;
      return 1.0 / (pi * b * (1 + z * z));
    }
    default:
      break;
  }
  if (!(x > 0)) return 0.0;
  switch (d.family) {
    case Family::kGamma:
      return std::exp((a - 1) * std::log(x) - x / b - std::lgamma(a) - a * std::log(b));
    case Family::kInverseGamma:
      return std::exp(a * std::log(b) - std::lgamma(a) - (a + 1) * std::log(x) - b / x);
    case Family::kExponential:
      return a * std::exp(-a * x);
    case Family::kLogNormal: {
      const double z = (std::log(x) - a) / b;
      return std::exp(-0.5 * z * z) / (x * b * std::sqrt(2 * pi));
    }
    case Family::kLogLogistic: {
      const double r = std::pow(x / b, a);
      return (a / x) * r / ((1 + r) * (1 + r));
    }
    case Family::kFrechet: {
      const double r = std::pow(x / b, -a);
      return (a / x) * r * std::exp(-r);
    }
    case Family::kGompertz:
      return a * b * std::exp(b * x - a * std::expm1(b * x));
    case Family::kWeibull: {
      const double r = std::pow(x / b, a);
      return (a / x) * r * std::exp(-r);
    }
    case Family::kBetaPrime:
      return std::exp((a - 1) * std::log(x) - (a + b) * std::log1p(x) -
                      (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)));
    case Family::kChiSquared:
      return std::exp((a / 2 - 1) * std::log(x) - x / 2 - (a / 2) * std::log(2.0) - std::lgamma(a / 2));
    case Family::kFDist:
      return std::exp(0.5 * (a * std::log(a * x) + b * std::log(b) - (a + b) * std::log(a * x + b)) -
                      std::log(x) - (std::lgamma(a / 2) + std::lgamma(b / 2) - std::lgamma((a + b) / 2)));
    default:
      return 0.0;
  }
}

}  // namespace gazeintent::oracle
