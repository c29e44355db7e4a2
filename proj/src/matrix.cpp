#include "riskagg/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace riskagg {

SquareMatrix::SquareMatrix(std::size_t n, double fill) : n_(n), data_(n * n, fill) {}

SquareMatrix::SquareMatrix(const std::vector<std::vector<double>>& rows) : n_(rows.size()) {
  data_.reserve(n_ * n_);
  for (const auto& r : rows) {
    if (r.size() != n_) throw std::invalid_argument("matrix: rows must form a square");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

std::vector<double> SquareMatrix::apply(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("matrix: dimension mismatch");
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
  }
  return y;
}

SquareMatrix SquareMatrix::operator*(const SquareMatrix& other) const {
  if (other.n_ != n_) throw std::invalid_argument("matrix: dimension mismatch");
  SquareMatrix out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k < n_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < n_; ++j) out(i, j) += a * other(k, j);
    }
  }
  return out;
}

double SquareMatrix::max_abs_difference(const SquareMatrix& other) const {
  if (other.n_ != n_) throw std::invalid_argument("matrix: dimension mismatch");
  double d = 0.0;
  for (std::size_t k = 0; k < data_.size(); ++k) d = std::max(d, std::abs(data_[k] - other.data_[k]));
  return d;
}

std::vector<std::vector<double>> SquareMatrix::rows() const {
  std::vector<std::vector<double>> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i].assign(row(i).begin(), row(i).end());
  return out;
}

std::string SquareMatrix::to_string(int precision) const {
  std::ostringstream os;
  os.precision(precision);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) os << (j ? " " : "") << (*this)(i, j);
    os << '\n';
  }
  return os.str();
}

DoublyStochasticMatrix::DoublyStochasticMatrix(SquareMatrix m) : m_(std::move(m)) {
  const std::size_t n = m_.size();
  if (n < 2) throw std::invalid_argument("doubly stochastic matrix: need n >= 2");
  for (std::size_t i = 0; i < n; ++i) {
    double rs = 0.0;
    double cs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(m_(i, j) >= 0.0) || !std::isfinite(m_(i, j))) {
        throw std::invalid_argument("doubly stochastic matrix: entries must be finite and nonnegative");
      }
      rs += m_(i, j);
      cs += m_(j, i);
    }
    if (std::abs(rs - 1.0) > kTolerance || std::abs(cs - 1.0) > kTolerance) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "doubly stochastic matrix: line %zu sums to %.17g / %.17g", i,
                    rs, cs);
      throw std::invalid_argument(buf);
    }
  }
}

DoublyStochasticMatrix DoublyStochasticMatrix::identity(std::size_t n) {
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return DoublyStochasticMatrix(std::move(m));
}

DoublyStochasticMatrix DoublyStochasticMatrix::uniform(std::size_t n) {
  return DoublyStochasticMatrix(SquareMatrix(n, 1.0 / static_cast<double>(n)));
}

DoublyStochasticMatrix DoublyStochasticMatrix::convex_identity_uniform(double a, std::size_t n) {
  if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("convex_identity_uniform: a must lie in [0, 1]");
  const double off = (1.0 - a) / static_cast<double>(n);
  SquareMatrix m(n, off);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = a + off;
  return DoublyStochasticMatrix(std::move(m));
}

DoublyStochasticMatrix DoublyStochasticMatrix::permutation(std::span<const std::size_t> perm) {
  const std::size_t n = perm.size();
  std::vector<bool> seen(n, false);
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (perm[i] >= n || seen[perm[i]]) throw std::invalid_argument("permutation: not a permutation");
    seen[perm[i]] = true;
    m(i, perm[i]) = 1.0;
  }
  return DoublyStochasticMatrix(std::move(m));
}

DoublyStochasticMatrix DoublyStochasticMatrix::operator*(const DoublyStochasticMatrix& other) const {
  return DoublyStochasticMatrix(m_ * other.m_);
}

DoublyStochasticMatrix matrix_power(const DoublyStochasticMatrix& L, unsigned k) {
  SquareMatrix acc = DoublyStochasticMatrix::identity(L.size()).matrix();
  for (unsigned step = 0; step < k; ++step) acc = acc * L.matrix();
  return DoublyStochasticMatrix(std::move(acc));
}

WeightVector::WeightVector(std::vector<double> weights, bool simplex) : w_(std::move(weights)) {
  if (w_.empty()) throw std::invalid_argument("weights: empty");
  double total = 0.0;
  for (double w : w_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights: must be finite and nonnegative");
    total += w;
  }
  if (simplex && std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("weights: must sum to 1");
}

WeightVector WeightVector::equal(std::size_t n) {
  return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

}  // namespace riskagg
