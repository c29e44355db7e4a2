#include "riskagg/orders.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace riskagg {
namespace {

std::vector<std::size_t> descending_order(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  return idx;
}

double sum_tolerance(std::span<const double> x) {
  double scale = 1.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  return 1e-10 * scale;
}

// Kuhn's augmenting paths on entries above the threshold.
bool perfect_matching(const SquareMatrix& R, double threshold, std::vector<std::size_t>& match_row) {
  const std::size_t n = R.size();
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> match_col(n, none);
  std::vector<char> visited;
  std::function<bool(std::size_t)> augment = [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (R(i, j) <= threshold || visited[j]) continue;
      visited[j] = 1;
      if (match_col[j] == none || augment(match_col[j])) {
        match_col[j] = i;
        return true;
      }
    }
    return false;
  };
  for (std::size_t i = 0; i < n; ++i) {
    visited.assign(n, 0);
    if (!augment(i)) return false;
  }
  match_row.assign(n, none);
  for (std::size_t j = 0; j < n; ++j) match_row[match_col[j]] = j;
  return true;
}

}  // namespace

bool majorizes(std::span<const double> lam, std::span<const double> gam) {
  if (lam.size() != gam.size()) throw std::invalid_argument("majorizes: lengths differ");
  const double tol = std::max(sum_tolerance(lam), sum_tolerance(gam));
  std::vector<double> a(lam.begin(), lam.end());
  std::vector<double> b(gam.begin(), gam.end());
  std::sort(a.begin(), a.end(), std::greater<>());
  std::sort(b.begin(), b.end(), std::greater<>());
  if (std::abs(std::accumulate(a.begin(), a.end(), 0.0) - std::accumulate(b.begin(), b.end(), 0.0)) > tol) {
    throw std::invalid_argument("majorizes: sums differ");
  }
  double sa = 0.0;
  double sb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    if (sb > sa + tol) return false;
  }
  return true;
}

DoublyStochasticMatrix majorization_matrix(std::span<const double> lam, std::span<const double> gam) {
  if (!majorizes(lam, gam)) throw std::domain_error("majorization_matrix: no doubly stochastic matrix maps lam to gam");
  const std::size_t n = lam.size();
  const auto ol = descending_order(lam);
  const auto og = descending_order(gam);
  std::vector<double> x(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = lam[ol[i]];
    y[i] = gam[og[i]];
  }
  const double tol = std::max(sum_tolerance(lam), sum_tolerance(gam));

  // M acts on the sorted vector: y = M x.
  SquareMatrix M = DoublyStochasticMatrix::identity(n).matrix();
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t j = n;
    for (std::size_t i = n; i-- > 0;) {
      if (x[i] > y[i] + tol) {
        j = i;
        break;
      }
    }
    if (j == n) break;
    std::size_t k = n;
    for (std::size_t i = j + 1; i < n; ++i) {
      if (x[i] < y[i] - tol) {
        k = i;
        break;
      }
    }
    if (k == n) break;
    const double delta = std::min(x[j] - y[j], y[k] - x[k]);
    const double s = delta / (x[j] - x[k]);  // weight moved between j and k
    SquareMatrix T = DoublyStochasticMatrix::identity(n).matrix();
    T(j, j) = 1.0 - s;
    T(k, k) = 1.0 - s;
    T(j, k) = s;
    T(k, j) = s;
    M = T * M;
    const double xj = x[j];
    const double xk = x[k];
    x[j] = (1.0 - s) * xj + s * xk;
    x[k] = s * xj + (1.0 - s) * xk;
  }

  SquareMatrix L(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) L(og[i], ol[j]) = M(i, j);
  }
  return DoublyStochasticMatrix(std::move(L));
}

SquareMatrix BirkhoffDecomposition::reconstruct() const {
  const std::size_t n = terms.empty() ? 0 : terms.front().permutation.size();
  SquareMatrix out(n);
  for (const auto& t : terms) {
    for (std::size_t i = 0; i < n; ++i) out(i, t.permutation[i]) += t.weight;
  }
  return out;
}

std::string BirkhoffDecomposition::to_string() const {
  std::ostringstream os;
  os.precision(10);
  os << "weight\tpermutation\n";
  for (const auto& t : terms) {
    os << t.weight << '\t';
    for (std::size_t i = 0; i < t.permutation.size(); ++i) os << (i ? " " : "") << t.permutation[i];
    os << '\n';
  }
  return os.str();
}

BirkhoffDecomposition birkhoff(const DoublyStochasticMatrix& L) {
  const std::size_t n = L.size();
  SquareMatrix R = L.matrix();
  BirkhoffDecomposition out;
  const std::size_t max_terms = n * n;  // the greedy never needs more than n^2 - 2n + 2
  while (out.terms.size() <= max_terms) {
    double largest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (double v : R.row(i)) largest = std::max(largest, v);
    }
    if (largest < 1e-10) break;
    std::vector<std::size_t> perm;
    if (!perfect_matching(R, 1e-12, perm)) {
      throw std::runtime_error("birkhoff: no perfect matching on positive entries; input is not doubly stochastic");
    }
    std::size_t argmin = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (R(i, perm[i]) < R(argmin, perm[argmin])) argmin = i;
    }
    const double w = R(argmin, perm[argmin]);
    for (std::size_t i = 0; i < n; ++i) {
      R(i, perm[i]) -= w;
      if (R(i, perm[i]) < 1e-15) R(i, perm[i]) = 0.0;
    }
    R(argmin, perm[argmin]) = 0.0;
    out.terms.push_back({w, std::move(perm)});
  }
  return out;
}

const std::vector<double>& default_probability_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g;
    for (int k = 0; k < 512; ++k) g.push_back((k + 0.5) / 512.0);
    for (int j = 0; j < 64; ++j) {
      const double e = std::pow(10.0, -3.0 - 9.0 * j / 63.0);
      g.push_back(e);
      g.push_back(1.0 - e);
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
  }();
  return grid;
}

bool stochastic_order_leq(const Distribution& F, const Distribution& G, std::span<const double> grid,
                          double rel_tol) {
  if (grid.empty()) throw std::invalid_argument("stochastic_order_leq: empty grid");
  for (double u : grid) {
    const double qf = F.quantile(u);
    const double qg = G.quantile(u);
    if (qf > qg + rel_tol * std::max(std::abs(qf), std::abs(qg))) return false;
  }
  return true;
}

bool convex_order_leq(const Distribution& F, const Distribution& G, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("convex_order_leq: empty grid");
  const double mf = F.mean();
  const double mg = G.mean();
  if (!std::isfinite(mf) || !std::isfinite(mg)) {
    throw std::domain_error("convex_order_leq: both distributions need a finite mean");
  }
  if (std::abs(mf - mg) > 1e-8 * std::max(1.0, std::abs(mf))) {
    throw std::invalid_argument("convex_order_leq: means differ");
  }
  for (double p : grid) {
    if (F.expected_shortfall(p) > G.expected_shortfall(p) + 1e-9) return false;
  }
  return true;
}

}  // namespace riskagg
