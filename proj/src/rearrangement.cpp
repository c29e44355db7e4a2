#include "riskagg/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace riskagg {

std::vector<double> QuantileMatrix::row_sums() const {
  std::vector<double> s(rows(), 0.0);
  for (const auto& c : columns) {
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += c[i];
  }
  return s;
}

void QuantileMatrix::write_csv(std::ostream& os) const {
  for (std::size_t j = 0; j < cols(); ++j) os << (j ? "," : "") << 'x' << j + 1;
  os << '\n';
  char buf[32];
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t j = 0; j < cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", columns[j][i]);
      os << (j ? "," : "") << buf;
    }
    os << '\n';
  }
}

QuantileMatrix discretize_tail(double p, std::span<const Distribution> F, std::size_t N, GridKind kind) {
  detail::require_probability_closed(p, "discretize_tail");
  if (p >= 1.0) throw std::domain_error("discretize_tail: p must be below 1");
  if (N < 2) throw std::invalid_argument("discretize_tail: need N >= 2");
  if (F.empty()) throw std::invalid_argument("discretize_tail: no margins");
  QuantileMatrix Q;
  Q.level = p;
  Q.kind = kind;
  const double dn = static_cast<double>(N);
  for (const auto& d : F) {
    std::vector<double> col(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double k = kind == GridKind::midpoint ? static_cast<double>(i) + 0.5 : static_cast<double>(i + 1);
      // 1 - (1-p)(N-k)/N keeps resolution near the top
      const double u = i + 1 == N && kind == GridKind::upper ? 1.0 : 1.0 - (1.0 - p) * (dn - k) / dn;
      col[i] = d.model().quantile(u);
      if (!std::isfinite(col[i])) throw std::domain_error("discretize_tail: quantile is infinite on this grid");
    }
    // guard against tiny inversion noise in numerically inverted quantiles
    for (std::size_t i = 1; i < N; ++i) col[i] = std::max(col[i], col[i - 1]);
    Q.columns.push_back(std::move(col));
  }
  return Q;
}

RAResult rearrange(QuantileMatrix Q, const RAOptions& opts) {
  const std::size_t N = Q.rows();
  const std::size_t n = Q.cols();
  if (N == 0) throw std::invalid_argument("rearrange: empty matrix");

  std::mt19937_64 rng(opts.seed);
  for (auto& c : Q.columns) std::shuffle(c.begin(), c.end(), rng);

  std::vector<double> sums = Q.row_sums();
  auto min_sum = [&] { return *std::min_element(sums.begin(), sums.end()); };

  RAResult out{min_sum(), {}, 0, {}};
  out.history.push_back(out.lower_var);
  if (n == 1) {
    out.matrix = std::move(Q);
    return out;
  }

  std::vector<std::size_t> order(N);
  std::vector<double> others(N);
  std::vector<double> sorted(N);
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    bool changed = false;
    for (std::size_t j = 0; j < n; ++j) {
      auto& col = Q.columns[j];
      std::fill(others.begin(), others.end(), 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        for (std::size_t i = 0; i < N; ++i) others[i] += Q.columns[k][i];
      }
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return others[a] < others[b]; });
      sorted = col;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      for (std::size_t r = 0; r < N; ++r) {
        const std::size_t i = order[r];
        if (col[i] != sorted[r]) {
          changed = true;
          col[i] = sorted[r];
        }
      }
      for (std::size_t i = 0; i < N; ++i) sums[i] = others[i] + col[i];
    }
    const double m = min_sum();
    out.sweeps = sweep;
    out.history.push_back(m);
    const double improvement = m - out.lower_var;
    out.lower_var = m;
    if (!changed || improvement < opts.eps * std::max(1.0, std::abs(m))) break;
  }
  out.matrix = std::move(Q);
  return out;
}

BoundResult ra_worst_case_var(double p, const MarginVector& F, std::size_t N, const RAOptions& opts) {
  detail::require_probability_open(p, "ra_worst_case_var");
  const auto res = rearrange(discretize_tail(p, F.margins(), N), opts);
  BoundResult r;
  r.value = res.lower_var;
  r.method = BoundMethod::ra_lower;
  r.exactness = Exactness::lower_bound;
  r.evaluations = res.sweeps;
  r.converged = res.sweeps < opts.max_sweeps;
  return r;
}

}  // namespace riskagg
