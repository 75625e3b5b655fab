#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "gazeintent/random.hpp"

namespace gazeintent {

/// Parameterization ledger (p1, p2):
///   Normal (mean, variance)          Gamma (shape, scale)
///   InverseGamma (shape, scale)      Exponential (rate, -)
///   LogNormal (mu, sigma) of log x   Logistic (location, scale)
///   LogLogistic (shape, scale)       Frechet (shape, scale)
///   Gumbel (location, scale), max    Gompertz (shape eta, rate b)
///   Weibull (shape, scale)           BetaPrime (alpha, beta)
///   Cauchy (location, scale)         ChiSquared (dof, -)
///   FDist (d1, d2)                   NoneUniform: support bounds
/// Gompertz CDF is 1 - exp(-eta (e^{b x} - 1)) on x >= 0.
enum class Family {
  kNormal,
  kGamma,
  kInverseGamma,
  kExponential,
  kLogNormal,
  kLogistic,
  kLogLogistic,
  kFrechet,
  kGumbel,
  kGompertz,
  kWeibull,
  kBetaPrime,
  kCauchy,
  kChiSquared,
  kFDist,
  kNoneUniform,
};

inline constexpr int kLedgerVersion = 1;

/// Candidate families in enumeration (tie-break) order.
inline constexpr std::array<Family, 15> kFittableFamilies = {
    Family::kNormal,   Family::kGamma,       Family::kInverseGamma, Family::kExponential,
    Family::kLogNormal, Family::kLogistic,   Family::kLogLogistic,  Family::kFrechet,
    Family::kGumbel,   Family::kGompertz,    Family::kWeibull,      Family::kBetaPrime,
    Family::kCauchy,   Family::kChiSquared,  Family::kFDist,
};

std::string_view family_name(Family family);
std::optional<Family> family_from_name(std::string_view name);
int parameter_count(Family family);

struct Support {
  double lo = 0;
  double hi = 0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  friend bool operator==(const Support&, const Support&) = default;
};

/// Natural support of a parametric family; NoneUniform has none of its own.
Support natural_support(Family family);

struct FittedDistribution {
  Family family = Family::kNoneUniform;
  double p1 = 0;
  double p2 = 0;
  Support support;
  std::optional<double> ks_p;

  friend bool operator==(const FittedDistribution&, const FittedDistribution&) = default;
};

/// Builds and validates a parametric distribution with its natural support.
FittedDistribution make_distribution(Family family, double p1, double p2 = 0);
FittedDistribution make_uniform(double lo, double hi);

/// Throws kParameterDomain when parameters fall outside the family's domain.
void validate(const FittedDistribution& d);

double pdf(const FittedDistribution& d, double x);
double log_pdf(const FittedDistribution& d, double x);
double cdf(const FittedDistribution& d, double x);
double quantile(const FittedDistribution& d, double p);
double sample(const FittedDistribution& d, Rng& rng);

enum class FitStatus { kOk, kDegenerate, kNotConverged };

struct MleFit {
  FittedDistribution distribution;
  FitStatus status = FitStatus::kOk;
  double log_likelihood = 0;
};

/// Maximum-likelihood fit. Samples outside the family's support raise
/// kSupport; samples sitting exactly on a finite support boundary are moved
/// 1e-12 inside first. Numeric searches stop on a 1e-9 log-likelihood change.
MleFit fit_mle(Family family, std::span<const double> samples);

double log_likelihood(const FittedDistribution& d, std::span<const double> samples);

struct KsResult {
  double statistic = 0;
  double p_value = 1;
};

/// One-sample two-sided KS test, asymptotic p-value with sqrt(n) scaling.
KsResult ks_test(std::span<const double> samples, const FittedDistribution& d);

inline constexpr double kKsAlpha = 0.05;
inline constexpr std::size_t kKsMaxSamples = 5000;
inline constexpr std::size_t kMinFitSamples = 8;

/// Fits every candidate family, keeps KS p > 0.05 and returns the highest p.
/// Above 5000 samples a Normal fit is returned untested; when nothing passes,
/// a uniform over [min, max] of the samples.
FittedDistribution select_best_fit(std::span<const double> samples);

}  // namespace gazeintent
