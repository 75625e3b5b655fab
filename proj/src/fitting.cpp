// Maximum-likelihood fitting for the candidate density families.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "gazeintent/distributions.hpp"
#include "gazeintent/error.hpp"
#include "gazeintent/special_functions.hpp"
#include "optimize.hpp"

namespace gazeintent {
namespace {

constexpr double kBoundaryNudge = 1e-12;

double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double mean_log(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::log(v);
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

double median_of(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double quartile_spread(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const auto at = [&](double p) {
    const double pos = p * static_cast<double>(x.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return i + 1 < x.size() ? x[i] + frac * (x[i + 1] - x[i]) : x[i];
  };
  return at(0.75) - at(0.25);
}

std::vector<double> prepare(Family family, std::span<const double> samples) {
  std::vector<double> x(samples.begin(), samples.end());
  const Support support = natural_support(family);
  for (double& v : x) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kSupport, "non-finite sample");
    if (v < support.lo) {
      throw Error(ErrorCode::kSupport, std::string(family_name(family)) +
                                           " support excludes sample " + std::to_string(v));
    }
    if (v == support.lo) v = support.lo + kBoundaryNudge;
  }
  return x;
}

MleFit finish(Family family, double p1, double p2, std::span<const double> x, bool converged) {
  MleFit fit;
  fit.distribution = FittedDistribution{family, p1, p2, natural_support(family), std::nullopt};
  try {
    validate(fit.distribution);
  } catch (const Error&) {
    fit.status = FitStatus::kNotConverged;
    fit.log_likelihood = -std::numeric_limits<double>::infinity();
    return fit;
  }
  fit.log_likelihood = log_likelihood(fit.distribution, x);
  fit.status = (converged && std::isfinite(fit.log_likelihood)) ? FitStatus::kOk
                                                                : FitStatus::kNotConverged;
  return fit;
}

MleFit degenerate(Family family, double p1, double p2) {
  MleFit fit;
  fit.distribution = FittedDistribution{family, p1, p2, natural_support(family), std::nullopt};
  fit.status = FitStatus::kDegenerate;
  fit.log_likelihood = std::numeric_limits<double>::quiet_NaN();
  return fit;
}

// Solves log k - digamma(k) = s for the gamma shape.
std::pair<double, bool> gamma_shape(double s) {
  double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  for (int i = 0; i < 200; ++i) {
    const double g = std::log(k) - special::digamma(k) - s;
    const double dg = 1.0 / k - special::trigamma(k);
    double next = k - g / dg;
    if (!(next > 0)) next = 0.5 * k;
    if (std::abs(next - k) <= 1e-14 * k) return {next, true};
    k = next;
  }
  return {k, false};
}

MleFit fit_gamma_like(Family family, std::span<const double> x) {
  const double m = mean(x);
  const double s = std::log(m) - mean_log(x);
  if (!(s > 0)) return degenerate(family, 0, 0);
  const auto [k, ok] = gamma_shape(s);
  return finish(family, k, m / k, x, ok);
}

// Weibull shape/scale via the profile score in k on max-normalized data.
std::pair<double, double> weibull_mle(std::span<const double> x, bool& ok) {
  const double xmax = *std::max_element(x.begin(), x.end());
  std::vector<double> ly(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) ly[i] = std::log(x[i] / xmax);
  const double mly = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  const auto score = [&](double k) {
    double num = 0.0;
    double den = 0.0;
    for (double l : ly) {
      const double w = std::exp(k * l);
      num += w * l;
      den += w;
    }
    return num / den - 1.0 / k - mly;
  };
  double lo = 0.05;
  double hi = 2.0;
  while (score(lo) > 0 && lo > 1e-6) lo *= 0.5;
  while (score(hi) < 0 && hi < 1e4) hi *= 2.0;
  const auto [k, converged] = detail::brent_root(score, lo, hi);
  double sum = 0.0;
  for (double l : ly) sum += std::exp(k * l);
  ok = converged;
  return {k, xmax * std::pow(sum / static_cast<double>(ly.size()), 1.0 / k)};
}

// Logistic location/scale by Nelder-Mead over (mu, log s).
std::pair<double, double> logistic_mle(std::span<const double> x, bool& ok) {
  const double n = static_cast<double>(x.size());
  const auto nll = [&](const Eigen::VectorXd& p) {
    const double s = std::exp(p(1));
    double sum = 0.0;
    for (double v : x) {
      const double az = std::abs((v - p(0)) / s);
      sum += -az - 2.0 * std::log1p(std::exp(-az));
    }
    return -(sum - n * p(1));
  };
  const double sd = std::sqrt(variance(x));
  Eigen::VectorXd x0(2);
  x0 << median_of({x.begin(), x.end()}), std::log(sd * std::numbers::sqrt3 / std::numbers::pi);
  Eigen::VectorXd step(2);
  step << 0.1 * sd, 0.1;
  const auto r = detail::nelder_mead(nll, x0, step);
  ok = r.converged;
  return {r.x(0), std::exp(r.x(1))};
}

MleFit fit_gumbel(std::span<const double> x) {
  const double xmin = *std::min_element(x.begin(), x.end());
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - xmin;
  const double my = mean(y);
  // Stationarity in beta: beta - mean(y) + sum(y e^{-y/beta}) / sum(e^{-y/beta}) = 0.
  const auto score = [&](double beta) {
    double num = 0.0;
    double den = 0.0;
    for (double v : y) {
      const double w = std::exp(-v / beta);
      num += v * w;
      den += w;
    }
    return beta - my + num / den;
  };
  const double init = std::sqrt(variance(y)) * std::numbers::sqrt3 * std::numbers::sqrt2 / std::numbers::pi;
  double lo = init * 0.01;
  double hi = init * 10.0;
  while (score(lo) > 0 && lo > 1e-300) lo *= 0.1;
  while (score(hi) < 0 && hi < 1e300) hi *= 10.0;
  const auto [beta, ok] = detail::brent_root(score, lo, hi);
  double sum = 0.0;
  for (double v : y) sum += std::exp(-v / beta);
  const double mu = -beta * std::log(sum / static_cast<double>(y.size())) + xmin;
  return finish(Family::kGumbel, mu, beta, x, ok);
}

MleFit fit_gompertz(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double sum_x = std::accumulate(x.begin(), x.end(), 0.0);
  const double m = sum_x / n;
  const double xmax = *std::max_element(x.begin(), x.end());
  // Profile log-likelihood in b, with eta = n / sum(expm1(b x)) substituted.
  const auto neg_profile = [&](double log_b) {
    const double b = std::exp(log_b);
    double s = 0.0;
    for (double v : x) s += std::expm1(b * v);
    return -(n * log_b + n * std::log(n) - n * std::log(s) + b * sum_x - n);
  };
  const double lo = std::log(1e-6 / m);
  const double hi = std::log(700.0 / xmax);
  const auto r = detail::brent_minimize(neg_profile, lo, hi, 1e-12);
  const double b = std::exp(r.x);
  double s = 0.0;
  for (double v : x) s += std::expm1(b * v);
  const bool interior = r.x > lo + 1e-6 && r.x < hi - 1e-6;
  return finish(Family::kGompertz, n / s, b, x, r.converged && interior);
}

MleFit fit_beta_prime(std::span<const double> x) {
  // MLE of BetaPrime(a, b) equals the Beta(a, b) MLE on y = x / (1 + x).
  double ly = 0.0;
  double l1y = 0.0;
  double my = 0.0;
  double my2 = 0.0;
  for (double v : x) {
    const double l1p = std::log1p(v);
    ly += std::log(v) - l1p;
    l1y -= l1p;
    const double y = v / (1.0 + v);
    my += y;
    my2 += y * y;
  }
  const double n = static_cast<double>(x.size());
  ly /= n;
  l1y /= n;
  my /= n;
  const double vy = my2 / n - my * my;
  if (!(vy > 0)) return degenerate(Family::kBetaPrime, 0, 0);
  const double common = std::max(my * (1.0 - my) / vy - 1.0, 1e-3);
  double a = std::max(my * common, 1e-3);
  double b = std::max((1.0 - my) * common, 1e-3);
  bool ok = false;
  for (int i = 0; i < 500; ++i) {
    const double dab = special::digamma(a + b);
    const double tab = special::trigamma(a + b);
    const double g1 = dab - special::digamma(a) + ly;
    const double g2 = dab - special::digamma(b) + l1y;
    const double h11 = tab - special::trigamma(a);
    const double h22 = tab - special::trigamma(b);
    const double h12 = tab;
    const double det = h11 * h22 - h12 * h12;
    double da = -(h22 * g1 - h12 * g2) / det;
    double db = -(-h12 * g1 + h11 * g2) / det;
    double t = 1.0;
    while (a + t * da <= 0 || b + t * db <= 0) t *= 0.5;
    a += t * da;
    b += t * db;
    if (std::abs(t * da) <= 1e-13 * a && std::abs(t * db) <= 1e-13 * b) {
      ok = true;
      break;
    }
  }
  return finish(Family::kBetaPrime, a, b, x, ok);
}

MleFit fit_chi_squared(std::span<const double> x) {
  // digamma(k/2) = mean(log x) - log 2
  const double target = mean_log(x) - std::numbers::ln2;
  double h = target >= -2.22 ? std::exp(target) + 0.5 : -1.0 / (target + 0.5772156649015329);
  bool ok = false;
  for (int i = 0; i < 200; ++i) {
    double next = h - (special::digamma(h) - target) / special::trigamma(h);
    if (!(next > 0)) next = 0.5 * h;
    if (std::abs(next - h) <= 1e-14 * h) {
      h = next;
      ok = true;
      break;
    }
    h = next;
  }
  return finish(Family::kChiSquared, 2.0 * h, 0.0, x, ok);
}

MleFit fit_fdist(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double slog = mean_log(x) * n;
  const auto nll = [&](const Eigen::VectorXd& p) {
    const double d1 = std::exp(p(0));
    const double d2 = std::exp(p(1));
    const double h1 = 0.5 * d1;
    const double h2 = 0.5 * d2;
    double s = 0.0;
    for (double v : x) s += std::log1p(d1 * v / d2);
    const double ll = n * h1 * std::log(d1 / d2) + (h1 - 1.0) * slog - (h1 + h2) * s -
                      n * special::log_beta(h1, h2);
    return -ll;
  };
  const double m = mean(x);
  const double d2 = m > 1.05 ? std::min(2.0 * m / (m - 1.0), 200.0) : 20.0;
  Eigen::VectorXd x0(2);
  x0 << std::log(5.0), std::log(d2);
  Eigen::VectorXd step(2);
  step << 0.5, 0.5;
  const auto r = detail::nelder_mead(nll, x0, step);
  return finish(Family::kFDist, std::exp(r.x(0)), std::exp(r.x(1)), x, r.converged);
}

MleFit fit_cauchy(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const auto nll = [&](const Eigen::VectorXd& p) {
    const double s = std::exp(p(1));
    double sum = 0.0;
    for (double v : x) {
      const double z = (v - p(0)) / s;
      sum += std::log1p(z * z);
    }
    return sum + n * p(1);
  };
  std::vector<double> copy(x.begin(), x.end());
  const double spread = std::max(quartile_spread(copy), 1e-12);
  Eigen::VectorXd x0(2);
  x0 << median_of(copy), std::log(0.5 * spread);
  Eigen::VectorXd step(2);
  step << 0.1 * spread, 0.1;
  const auto r = detail::nelder_mead(nll, x0, step);
  return finish(Family::kCauchy, r.x(0), std::exp(r.x(1)), x, r.converged);
}

}  // namespace

MleFit fit_mle(Family family, std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::kDegenerateSample, "fit_mle on an empty sample");
  const std::vector<double> x = prepare(family, samples);
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  const bool constant = *mn == *mx;

  switch (family) {
    case Family::kNormal: {
      const double m = mean(x);
      const double v = variance(x);
      if (!(v > 0)) return degenerate(family, m, 0.0);
      return finish(family, m, v, x, true);
    }
    case Family::kExponential:
      return finish(family, 1.0 / mean(x), 0.0, x, true);
    case Family::kLogNormal: {
      const double mu = mean_log(x);
      double s = 0.0;
      for (double v : x) s += (std::log(v) - mu) * (std::log(v) - mu);
      s = std::sqrt(s / static_cast<double>(x.size()));
      if (!(s > 0)) return degenerate(family, mu, 0.0);
      return finish(family, mu, s, x, true);
    }
    case Family::kNoneUniform:
      if (constant) return degenerate(family, *mn, *mx);
      return {make_uniform(*mn, *mx), FitStatus::kOk,
              -static_cast<double>(x.size()) * std::log(*mx - *mn)};
    default:
      break;
  }

  if (constant || x.size() < 2) return degenerate(family, 0.0, 0.0);

  switch (family) {
    case Family::kGamma:
      return fit_gamma_like(Family::kGamma, x);
    case Family::kInverseGamma: {
      std::vector<double> inv(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) inv[i] = 1.0 / x[i];
      const MleFit g = fit_gamma_like(Family::kGamma, inv);
      if (g.status == FitStatus::kDegenerate) return degenerate(family, 0, 0);
      return finish(family, g.distribution.p1, 1.0 / g.distribution.p2, x,
                    g.status == FitStatus::kOk);
    }
    case Family::kWeibull: {
      bool ok = false;
      const auto [k, lambda] = weibull_mle(x, ok);
      return finish(family, k, lambda, x, ok);
    }
    case Family::kFrechet: {
      std::vector<double> inv(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) inv[i] = 1.0 / x[i];
      bool ok = false;
      const auto [k, lambda] = weibull_mle(inv, ok);
      return finish(family, k, 1.0 / lambda, x, ok);
    }
    case Family::kLogistic: {
      bool ok = false;
      const auto [mu, s] = logistic_mle(x, ok);
      return finish(family, mu, s, x, ok);
    }
    case Family::kLogLogistic: {
      std::vector<double> logs(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) logs[i] = std::log(x[i]);
      bool ok = false;
      const auto [mu, s] = logistic_mle(logs, ok);
      return finish(family, 1.0 / s, std::exp(mu), x, ok);
    }
    case Family::kGumbel:
      return fit_gumbel(x);
    case Family::kGompertz:
      return fit_gompertz(x);
    case Family::kBetaPrime:
      return fit_beta_prime(x);
    case Family::kCauchy:
      return fit_cauchy(x);
    case Family::kChiSquared:
      return fit_chi_squared(x);
    case Family::kFDist:
      return fit_fdist(x);
    default:
      break;
  }
  return degenerate(family, 0, 0);
}

}  // namespace gazeintent
