#include "gazeintent/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "gazeintent/error.hpp"
#include "gazeintent/special_functions.hpp"

namespace gazeintent {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FamilyInfo {
  Family family;
  std::string_view name;
  int parameters;
  bool positive_support;
};

constexpr std::array<FamilyInfo, 16> kFamilies = {{
    {Family::kNormal, "Normal", 2, false},
    {Family::kGamma, "Gamma", 2, true},
    {Family::kInverseGamma, "InverseGamma", 2, true},
    {Family::kExponential, "Exponential", 1, true},
    {Family::kLogNormal, "LogNormal", 2, true},
    {Family::kLogistic, "Logistic", 2, false},
    {Family::kLogLogistic, "LogLogistic", 2, true},
    {Family::kFrechet, "Frechet", 2, true},
    {Family::kGumbel, "Gumbel", 2, false},
    {Family::kGompertz, "Gompertz", 2, true},
    {Family::kWeibull, "Weibull", 2, true},
    {Family::kBetaPrime, "BetaPrime", 2, true},
    {Family::kCauchy, "Cauchy", 2, false},
    {Family::kChiSquared, "ChiSquared", 1, true},
    {Family::kFDist, "FDist", 2, true},
    {Family::kNoneUniform, "None", 2, false},
}};

const FamilyInfo& info(Family family) { return kFamilies[static_cast<std::size_t>(family)]; }

[[noreturn]] void domain_error(const FittedDistribution& d) {
  throw Error(ErrorCode::kParameterDomain, std::string(family_name(d.family)) + " parameters (" +
                                               std::to_string(d.p1) + ", " + std::to_string(d.p2) +
                                               ") outside the family domain");
}

// Inverts a continuous CDF by bisection on [lo, hi], expanding hi as needed.
double invert_cdf(const FittedDistribution& d, double p, double lo, double hi) {
  while (cdf(d, hi) < p) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) return kInf;
  }
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (cdf(d, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::string_view family_name(Family family) { return info(family).name; }

std::optional<Family> family_from_name(std::string_view name) {
  for (const auto& f : kFamilies) {
    if (f.name == name) return f.family;
  }
  if (name == "NoneUniform") return Family::kNoneUniform;
  return std::nullopt;
}

int parameter_count(Family family) { return info(family).parameters; }

Support natural_support(Family family) {
  if (family == Family::kNoneUniform) return {0.0, 0.0};
  if (info(family).positive_support) return {0.0, kInf};
  return {-kInf, kInf};
}

void validate(const FittedDistribution& d) {
  const double a = d.p1;
  const double b = d.p2;
  const bool finite = std::isfinite(a) && std::isfinite(b);
  bool ok = finite;
  switch (d.family) {
    case Family::kNormal:
    case Family::kLogNormal:
    case Family::kLogistic:
    case Family::kGumbel:
    case Family::kCauchy:
      ok = ok && b > 0;
      break;
    case Family::kExponential:
    case Family::kChiSquared:
      ok = ok && a > 0;
      break;
    case Family::kGamma:
    case Family::kInverseGamma:
    case Family::kLogLogistic:
    case Family::kFrechet:
    case Family::kGompertz:
    case Family::kWeibull:
    case Family::kBetaPrime:
    case Family::kFDist:
      ok = ok && a > 0 && b > 0;
      break;
    case Family::kNoneUniform:
      ok = ok && d.support.lo < d.support.hi && d.support.lo == a && d.support.hi == b;
      break;
  }
  if (!ok) domain_error(d);
}

FittedDistribution make_distribution(Family family, double p1, double p2) {
  if (family == Family::kNoneUniform) return make_uniform(p1, p2);
  FittedDistribution d{family, p1, parameter_count(family) == 1 ? 0.0 : p2, natural_support(family),
                       std::nullopt};
  validate(d);
  return d;
}

FittedDistribution make_uniform(double lo, double hi) {
  FittedDistribution d{Family::kNoneUniform, lo, hi, {lo, hi}, std::nullopt};
  validate(d);
  return d;
}

double log_pdf(const FittedDistribution& d, double x) {
  const double a = d.p1;
  const double b = d.p2;
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (!d.support.contains(x)) return -kInf;
  switch (d.family) {
    case Family::kNormal: {
      const double z = x - a;
      return -0.5 * z * z / b - 0.5 * std::log(2.0 * std::numbers::pi * b);
    }
    case Family::kGamma:
      return (a - 1.0) * std::log(x) - x / b - std::lgamma(a) - a * std::log(b);
    case Family::kInverseGamma:
      return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
    case Family::kExponential:
      return std::log(a) - a * x;
    case Family::kLogNormal: {
      const double z = (std::log(x) - a) / b;
      return -0.5 * z * z - std::log(x * b) - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    case Family::kLogistic: {
      const double z = (x - a) / b;
      const double az = std::abs(z);
      return -az - 2.0 * std::log1p(std::exp(-az)) - std::log(b);
    }
    case Family::kLogLogistic: {
      // shape a, scale b
      const double lr = std::log(x / b);
      const double u = a * lr;
      return std::log(a / b) + (a - 1.0) * lr - 2.0 * (u > 0 ? u + std::log1p(std::exp(-u))
                                                            : std::log1p(std::exp(u)));
    }
    case Family::kFrechet: {
      const double lr = std::log(x / b);
      return std::log(a / b) - (1.0 + a) * lr - std::exp(-a * lr);
    }
    case Family::kGumbel: {
      const double z = (x - a) / b;
      return -z - std::exp(-z) - std::log(b);
    }
    case Family::kGompertz:
      return std::log(a * b) + a + b * x - a * std::exp(b * x);
    case Family::kWeibull: {
      const double lr = std::log(x / b);
      return std::log(a / b) + (a - 1.0) * lr - std::exp(a * lr);
    }
    case Family::kBetaPrime:
      return (a - 1.0) * std::log(x) - (a + b) * std::log1p(x) - special::log_beta(a, b);
    case Family::kCauchy: {
      const double z = (x - a) / b;
      return -std::log(std::numbers::pi * b * (1.0 + z * z));
    }
    case Family::kChiSquared: {
      const double h = 0.5 * a;
      return (h - 1.0) * std::log(x) - 0.5 * x - h * std::numbers::ln2 - std::lgamma(h);
    }
    case Family::kFDist: {
      const double h1 = 0.5 * a;
      const double h2 = 0.5 * b;
      return h1 * std::log(a / b) + (h1 - 1.0) * std::log(x) - (h1 + h2) * std::log1p(a * x / b) -
             special::log_beta(h1, h2);
    }
    case Family::kNoneUniform:
      return -std::log(d.support.hi - d.support.lo);
  }
  return -kInf;
}

double pdf(const FittedDistribution& d, double x) {
  validate(d);
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (!d.support.contains(x)) return 0.0;
  const double a = d.p1;
  const double b = d.p2;
  switch (d.family) {
    case Family::kNormal: {
      const double z = x - a;
      return std::exp(-0.5 * z * z / b) / std::sqrt(2.0 * std::numbers::pi * b);
    }
    case Family::kExponential:
      return a * std::exp(-a * x);
    case Family::kWeibull: {
      if (x == 0.0) return a < 1.0 ? kInf : (a == 1.0 ? 1.0 / b : 0.0);
      const double r = x / b;
      return (a / b) * std::pow(r, a - 1.0) * std::exp(-std::pow(r, a));
    }
    case Family::kLogistic: {
      const double e = std::exp(-std::abs(x - a) / b);
      return e / (b * (1.0 + e) * (1.0 + e));
    }
    case Family::kGumbel: {
      const double z = (x - a) / b;
      return std::exp(-z - std::exp(-z)) / b;
    }
    case Family::kGompertz:
      return a * b * std::exp(a + b * x - a * std::exp(b * x));
    case Family::kCauchy: {
      const double z = (x - a) / b;
      return 1.0 / (std::numbers::pi * b * (1.0 + z * z));
    }
    case Family::kNoneUniform:
      return 1.0 / (d.support.hi - d.support.lo);
    default:
      if (x == 0.0) {
        // Boundary of a positive-support family; take the right limit.
        const double l = log_pdf(d, std::numeric_limits<double>::denorm_min());
        return std::isinf(l) && l > 0 ? kInf : (std::exp(l) > 1e300 ? kInf : std::exp(l));
      }
      return std::exp(log_pdf(d, x));
  }
}

double cdf(const FittedDistribution& d, double x) {
  const double a = d.p1;
  const double b = d.p2;
  if (x <= d.support.lo) return 0.0;
  if (x >= d.support.hi) return 1.0;
  switch (d.family) {
    case Family::kNormal:
      return special::normal_cdf((x - a) / std::sqrt(b));
    case Family::kGamma:
      return special::gamma_p(a, x / b);
    case Family::kInverseGamma:
      return special::gamma_q(a, b / x);
    case Family::kExponential:
      return -std::expm1(-a * x);
    case Family::kLogNormal:
      return special::normal_cdf((std::log(x) - a) / b);
    case Family::kLogistic:
      return 1.0 / (1.0 + std::exp(-(x - a) / b));
    case Family::kLogLogistic:
      return 1.0 / (1.0 + std::pow(x / b, -a));
    case Family::kFrechet:
      return std::exp(-std::pow(x / b, -a));
    case Family::kGumbel:
      return std::exp(-std::exp(-(x - a) / b));
    case Family::kGompertz:
      return -std::expm1(-a * std::expm1(b * x));
    case Family::kWeibull:
      return -std::expm1(-std::pow(x / b, a));
    case Family::kBetaPrime:
      return special::beta_inc(a, b, x / (1.0 + x));
    case Family::kCauchy:
      return 0.5 + std::atan((x - a) / b) / std::numbers::pi;
    case Family::kChiSquared:
      return special::gamma_p(0.5 * a, 0.5 * x);
    case Family::kFDist:
      return special::beta_inc(0.5 * a, 0.5 * b, a * x / (a * x + b));
    case Family::kNoneUniform:
      return (x - d.support.lo) / (d.support.hi - d.support.lo);
  }
  return 0.0;
}

double quantile(const FittedDistribution& d, double p) {
  validate(d);
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kParameterDomain, "quantile probability outside [0, 1]");
  }
  if (p == 0.0) return d.support.lo;
  if (p == 1.0) return d.support.hi;
  const double a = d.p1;
  const double b = d.p2;
  switch (d.family) {
    case Family::kNormal:
      return a + std::sqrt(b) * special::normal_quantile(p);
    case Family::kExponential:
      return -std::log1p(-p) / a;
    case Family::kLogNormal:
      return std::exp(a + b * special::normal_quantile(p));
    case Family::kLogistic:
      return a + b * std::log(p / (1.0 - p));
    case Family::kLogLogistic:
      return b * std::pow(p / (1.0 - p), 1.0 / a);
    case Family::kFrechet:
      return b * std::pow(-std::log(p), -1.0 / a);
    case Family::kGumbel:
      return a - b * std::log(-std::log(p));
    case Family::kGompertz:
      return std::log1p(-std::log1p(-p) / a) / b;
    case Family::kWeibull:
      return b * std::pow(-std::log1p(-p), 1.0 / a);
    case Family::kCauchy:
      return a + b * std::tan(std::numbers::pi * (p - 0.5));
    case Family::kNoneUniform:
      return d.support.lo + p * (d.support.hi - d.support.lo);
    case Family::kGamma:
      return invert_cdf(d, p, 0.0, a * b + 1e-300);
    case Family::kInverseGamma:
      return invert_cdf(d, p, 0.0, b / (a + 1.0) + 1e-300);
    case Family::kChiSquared:
      return invert_cdf(d, p, 0.0, a + 1e-300);
    case Family::kBetaPrime:
    case Family::kFDist:
      return invert_cdf(d, p, 0.0, 1.0);
  }
  return 0.0;
}

double sample(const FittedDistribution& d, Rng& rng) {
  validate(d);
  const double a = d.p1;
  const double b = d.p2;
  switch (d.family) {
    case Family::kNormal:
      return rng.normal(a, std::sqrt(b));
    case Family::kGamma:
      return rng.gamma(a) * b;
    case Family::kInverseGamma:
      return b / rng.gamma(a);
    case Family::kLogNormal:
      return std::exp(rng.normal(a, b));
    case Family::kBetaPrime: {
      const double g1 = rng.gamma(a);
      const double g2 = rng.gamma(b);
      return g1 / g2;
    }
    case Family::kChiSquared:
      return 2.0 * rng.gamma(0.5 * a);
    case Family::kFDist: {
      const double x1 = 2.0 * rng.gamma(0.5 * a) / a;
      const double x2 = 2.0 * rng.gamma(0.5 * b) / b;
      return x1 / x2;
    }
    default:
      // Closed-form inverse CDF on an open-interval uniform.
      return quantile(d, rng.uniform());
  }
}

double log_likelihood(const FittedDistribution& d, std::span<const double> samples) {
  double ll = 0.0;
  for (double x : samples) ll += log_pdf(d, x);
  return ll;
}

KsResult ks_test(std::span<const double> samples, const FittedDistribution& d) {
  validate(d);
  if (samples.size() < kMinFitSamples) {
    throw Error(ErrorCode::kDegenerateSample,
                "ks_test needs at least " + std::to_string(kMinFitSamples) + " samples");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    throw Error(ErrorCode::kDegenerateSample, "ks_test on zero-variance samples");
  }
  const double n = static_cast<double>(sorted.size());
  double stat = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(d, sorted[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    stat = std::max({stat, above, below});
  }
  return {stat, special::kolmogorov_survival(std::sqrt(n) * stat)};
}

FittedDistribution select_best_fit(std::span<const double> samples) {
  if (samples.size() < kMinFitSamples) {
    throw Error(ErrorCode::kInsufficientRows,
                "select_best_fit needs at least " + std::to_string(kMinFitSamples) + " samples");
  }
  for (double x : samples) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kSupport, "non-finite sample");
  }
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const auto fallback = [&] {
    if (*mn == *mx) return make_uniform(*mn - 0.5, *mx + 0.5);
    return make_uniform(*mn, *mx);
  };
  if (*mn == *mx) return fallback();

  if (samples.size() > kKsMaxSamples) {
    const MleFit fit = fit_mle(Family::kNormal, samples);
    if (fit.status != FitStatus::kOk) return fallback();
    return fit.distribution;
  }

  std::optional<FittedDistribution> best;
  double best_p = kKsAlpha;
  for (Family family : kFittableFamilies) {
    try {
      const MleFit fit = fit_mle(family, samples);
      if (fit.status != FitStatus::kOk) continue;
      const KsResult ks = ks_test(samples, fit.distribution);
      if (ks.p_value > best_p) {
        best_p = ks.p_value;
        best = fit.distribution;
        best->ks_p = ks.p_value;
      }
    } catch (const Error&) {
      // A family that cannot be fitted only drops out of the comparison.
    }
  }
  return best ? *best : fallback();
}

}  // namespace gazeintent
