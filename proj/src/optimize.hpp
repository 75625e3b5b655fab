#pragma once

// Small derivative-free optimizers used by the maximum-likelihood fitters.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace gazeintent::detail {

inline double finite_or_huge(double v) { return std::isfinite(v) ? v : 1e300; }

struct Minimum1D {
  double x = 0;
  double f = 0;
  bool converged = false;
};

/// Brent's parabolic-interpolation minimizer on [a, b].
template <typename F>
Minimum1D brent_minimize(F&& f, double a, double b, double tol = 1e-10, int max_iter = 500) {
  constexpr double kGolden = 0.3819660112501051;
  double x = a + kGolden * (b - a);
  double w = x;
  double v = x;
  double fx = finite_or_huge(f(x));
  double fw = fx;
  double fv = fx;
  double d = 0.0;
  double e = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    const double m = 0.5 * (a + b);
    const double tol1 = tol * std::abs(x) + 1e-14;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) return {x, fx, true};
    bool golden = true;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double e_prev = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (m >= x) ? tol1 : -tol1;
        golden = false;
      }
    }
    if (golden) {
      e = (x >= m) ? a - x : b - x;
      d = kGolden * e;
    }
    const double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0 ? tol1 : -tol1);
    const double fu = finite_or_huge(f(u));
    if (fu <= fx) {
      if (u >= x) {
        a = x;
      } else {
        b = x;
      }
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      if (u < x) {
        a = u;
      } else {
        b = u;
      }
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return {x, fx, false};
}

/// Root of f on [a, b] by bisection/secant (Brent-Dekker). Requires a sign change.
template <typename F>
std::pair<double, bool> brent_root(F&& f, double a, double b, double tol = 1e-14,
                                   int max_iter = 500) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return {a, true};
  if (fb == 0.0) return {b, true};
  if ((fa > 0) == (fb > 0)) return {0.5 * (a + b), false};
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol * std::abs(b) + 1e-300;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol1 || fb == 0.0) return {b, true};
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p = 0.0;
      double q = 0.0;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) {
        q = -q;
      } else {
        p = -p;
      }
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = d;
      }
    } else {
      d = m;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (m > 0 ? tol1 : -tol1);
    fb = f(b);
  }
  return {b, false};
}

struct MinimumND {
  Eigen::VectorXd x;
  double f = 0;
  bool converged = false;
};

/// Nelder-Mead with restarts; stops when a restart improves f by less than ftol.
template <typename F>
MinimumND nelder_mead(F&& f, Eigen::VectorXd x0, const Eigen::VectorXd& step, double ftol = 1e-9,
                      int max_evals = 40000) {
  const auto n = x0.size();
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return finite_or_huge(f(x));
  };

  double best_f = eval(x0);
  Eigen::VectorXd best = x0;
  for (int restart = 0; restart < 20; ++restart) {
    std::vector<Eigen::VectorXd> simplex(n + 1, best);
    std::vector<double> values(n + 1, best_f);
    const double shrink_step = restart == 0 ? 1.0 : 0.1;
    for (Eigen::Index i = 0; i < n; ++i) {
      simplex[i + 1](i) += step(i) * shrink_step;
      values[i + 1] = eval(simplex[i + 1]);
    }
    std::vector<std::size_t> order(n + 1);
    while (evals < max_evals) {
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](auto l, auto r) { return values[l] < values[r]; });
      const std::size_t lo = order.front();
      const std::size_t hi = order.back();
      const std::size_t next_hi = order[n - 1];
      // The spread cannot shrink below the rounding noise of f itself.
      const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(values[lo]);
      if (values[hi] - values[lo] <= std::max(1e-3 * ftol, floor)) break;

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (std::size_t i = 0; i <= static_cast<std::size_t>(n); ++i) {
        if (i != hi) centroid += simplex[i];
      }
      centroid /= static_cast<double>(n);

      const Eigen::VectorXd reflected = centroid + (centroid - simplex[hi]);
      const double fr = eval(reflected);
      if (fr < values[lo]) {
        const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[hi]);
        const double fe = eval(expanded);
        if (fe < fr) {
          simplex[hi] = expanded;
          values[hi] = fe;
        } else {
          simplex[hi] = reflected;
          values[hi] = fr;
        }
      } else if (fr < values[next_hi]) {
        simplex[hi] = reflected;
        values[hi] = fr;
      } else {
        const bool outside = fr < values[hi];
        const Eigen::VectorXd contracted =
            outside ? centroid + 0.5 * (reflected - centroid) : centroid + 0.5 * (simplex[hi] - centroid);
        const double fc = eval(contracted);
        if (fc < std::min(fr, values[hi])) {
          simplex[hi] = contracted;
          values[hi] = fc;
        } else {
          for (std::size_t i = 0; i <= static_cast<std::size_t>(n); ++i) {
            if (i == lo) continue;
            simplex[i] = simplex[lo] + 0.5 * (simplex[i] - simplex[lo]);
            values[i] = eval(simplex[i]);
          }
        }
      }
    }
    const auto it = std::min_element(values.begin(), values.end());
    const double improvement = best_f - *it;
    if (*it <= best_f) {
      best_f = *it;
      best = simplex[static_cast<std::size_t>(it - values.begin())];
    }
    if (restart > 0 && improvement < ftol) return {best, best_f, true};
    if (evals >= max_evals) break;
  }
  return {best, best_f, false};
}

}  // namespace gazeintent::detail
