#include "riskagg/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace riskagg {
namespace {

struct Simplex {
  std::vector<std::vector<double>> x;
  std::vector<double> f;
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<double> best_x = x0;
  double best_f = eval(x0);
  bool converged = false;

  for (int round = 0; round <= opts.restarts_at_best && evals < opts.max_evals; ++round) {
    Simplex s;
    s.x.push_back(best_x);
    s.f.push_back(best_f);
    for (std::size_t i = 0; i < n; ++i) {
      auto xi = best_x;
      xi[i] += opts.initial_step;
      s.x.push_back(xi);
      s.f.push_back(eval(xi));
    }

    converged = false;
    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n);
    auto point = [&](double t, const std::vector<double>& worst) {
      std::vector<double> p(n);
      for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + t * (worst[k] - centroid[k]);
      return p;
    };

    while (evals < opts.max_evals) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.f[a] < s.f[b]; });
      const std::size_t lo = order.front();
      const std::size_t hi = order.back();
      const std::size_t second = order[n - 1];
      const double flo = s.f[lo];
      const double fhi = s.f[hi];
      if (std::isfinite(fhi) && fhi - flo <= opts.tol * (std::abs(flo) + 1e-300)) {
        converged = true;
        break;
      }
      // a collapsed simplex cannot make progress either
      double diameter = 0.0;
      for (std::size_t v = 0; v <= n; ++v) {
        for (std::size_t k = 0; k < n; ++k) diameter = std::max(diameter, std::abs(s.x[v][k] - s.x[lo][k]));
      }
      if (diameter < 1e-14) {
        converged = true;
        break;
      }

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t v = 0; v <= n; ++v) {
        if (v == hi) continue;
        for (std::size_t k = 0; k < n; ++k) centroid[k] += s.x[v][k] / static_cast<double>(n);
      }

      auto xr = point(-1.0, s.x[hi]);
      const double fr = eval(xr);
      if (fr < flo) {
        auto xe = point(-2.0, s.x[hi]);
        const double fe = eval(xe);
        if (fe < fr) {
          s.x[hi] = std::move(xe);
          s.f[hi] = fe;
        } else {
          s.x[hi] = std::move(xr);
          s.f[hi] = fr;
        }
        continue;
      }
      if (fr < s.f[second]) {
        s.x[hi] = std::move(xr);
        s.f[hi] = fr;
        continue;
      }
      const bool outside = fr < fhi;
      auto xc = point(outside ? -0.5 : 0.5, s.x[hi]);
      const double fc = eval(xc);
      if (fc < (outside ? fr : fhi)) {
        s.x[hi] = std::move(xc);
        s.f[hi] = fc;
        continue;
      }
      for (std::size_t v = 0; v <= n; ++v) {
        if (v == lo) continue;
        for (std::size_t k = 0; k < n; ++k) s.x[v][k] = s.x[lo][k] + 0.5 * (s.x[v][k] - s.x[lo][k]);
        s.f[v] = eval(s.x[v]);
      }
    }

    const auto it = std::min_element(s.f.begin(), s.f.end());
    const auto idx = static_cast<std::size_t>(it - s.f.begin());
    const double previous = best_f;
    if (*it <= best_f) {
      best_f = *it;
      best_x = s.x[idx];
    }
    if (!converged) break;
    // a rebuilt simplex that finds nothing better confirms the minimum
    if (round > 0 && !(best_f < previous - opts.tol * std::abs(previous))) break;
  }
  return {std::move(best_x), best_f, evals, converged};
}

}  // namespace riskagg
