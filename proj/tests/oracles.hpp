#pragma once

// Independent numerical routes used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "riskagg/bounds.hpp"
#include "riskagg/distributions.hpp"
#include "riskagg/matrix.hpp"

namespace oracle {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m));
  const double frm = f(0.5 * (m + b));
  if (!std::isfinite(flm) || !std::isfinite(frm)) return flm + frm;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson on [a, b], recursion depth capped at 40. The tolerance is
/// absolute for integrals of order one and relative beyond.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-10) {
  if (b <= a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm)) return fa + fb + fm;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol * std::max(1.0, std::abs(whole)), 40);
}

/// Integral of q over [a, b] in u-space. An end at 0 or 1 is approached by
/// geometrically shrinking panels; the last 1e-13 of a tail at 1 is dropped,
/// which is below 1e-8 for every finite-mean law in the tests.
inline double quantile_integral(const riskagg::Distribution& d, double a, double b, double tol = 1e-10) {
  const auto& m = d.model();
  auto q = [&](double u) { return m.quantile(u); };
  double lo = a;
  double hi = b;
  double total = 0.0;
  if (a <= 0.0) {
    lo = std::min(0.5 * b, 0.25);
    double l = 0.5 * lo;
    double h = lo;
    for (int k = 0; k < 1000 && h > 1e-300; ++k) {
      total += adaptive_simpson(q, l, h, tol);
      h = l;
      l *= 0.5;
    }
  }
  if (b >= 1.0) {
    hi = std::max(1.0 - 0.5 * (1.0 - lo), 0.75);
    double w = 1.0 - hi;
    while (w > 1e-13) {
      total += adaptive_simpson(q, 1.0 - w, 1.0 - 0.5 * w, tol);
      if (!std::isfinite(total)) return total;
      w *= 0.5;
    }
  }
  return total + adaptive_simpson(q, lo, hi, tol);
}

/// inf{x : F(x) >= u} by bracket expansion and bisection to 1e-12 relative.
inline double bisection_quantile(const riskagg::Distribution& d, double u) {
  double lo = -1.0;
  double hi = 1.0;
  while (d.cdf(lo) >= u) lo *= 2.0;
  while (d.cdf(hi) < u) hi *= 2.0;
  for (int it = 0; it < 400 && hi - lo > 1e-12 * std::max(std::abs(lo), std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (d.cdf(mid) >= u) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// Doubly stochastic matrix from Sinkhorn scaling of a positive random matrix.
inline riskagg::DoublyStochasticMatrix sinkhorn(std::size_t n, std::mt19937_64& rng, int iterations = 200) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  riskagg::SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = unif(rng);
  }
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += m(i, j);
      for (std::size_t j = 0; j < n; ++j) m(i, j) /= s;
    }
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += m(i, j);
      for (std::size_t i = 0; i < n; ++i) m(i, j) /= s;
    }
  }
  // a final row pass leaves columns within rounding of 1
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += m(i, j);
    for (std::size_t j = 0; j < n; ++j) m(i, j) /= s;
  }
  return riskagg::DoublyStochasticMatrix(std::move(m));
}

/// Minimum of the dual objective for n = 2 over a grid on B_2.
inline double brute_force_dual_n2(double p, const riskagg::MarginVector& F, int steps) {
  double best = riskagg::kInfinity;
  for (int i = 0; i < steps; ++i) {
    for (int j = 0; i + j < steps; ++j) {
      const double b1 = static_cast<double>(i) / steps;
      const double b2 = static_cast<double>(j) / steps;
      const double slack = static_cast<double>(steps - i - j) / steps;
      best = std::min(best, riskagg::dual_objective(p, F, riskagg::BetaVector({b1, b2}, slack)));
    }
  }
  return best;
}

}  // namespace oracle
