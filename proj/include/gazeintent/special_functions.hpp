#pragma once

namespace gazeintent::special {

double digamma(double x);
double trigamma(double x);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

double log_beta(double a, double b);

double normal_cdf(double z);
/// Inverse standard normal CDF, 0 < p < 1.
double normal_quantile(double p);

/// Two-sided p-value of Student's t with (possibly fractional) dof.
double student_t_two_sided(double t, double dof);

/// Kolmogorov survival function Q(lambda) = P(sqrt(n) D > lambda), asymptotic.
double kolmogorov_survival(double lambda);

}  // namespace gazeintent::special
