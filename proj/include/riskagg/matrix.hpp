#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace riskagg {

/// Dense row-major n x n matrix.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0);
  explicit SquareMatrix(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

  std::vector<double> apply(std::span<const double> x) const;
  SquareMatrix operator*(const SquareMatrix& other) const;
  double max_abs_difference(const SquareMatrix& other) const;
  std::vector<std::vector<double>> rows() const;
  std::string to_string(int precision = 6) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Nonnegative square matrix with unit row and column sums (within 1e-12),
/// n >= 2. Invalid input is rejected, never renormalized.
class DoublyStochasticMatrix {
 public:
  explicit DoublyStochasticMatrix(SquareMatrix m);
  explicit DoublyStochasticMatrix(const std::vector<std::vector<double>>& rows)
      : DoublyStochasticMatrix(SquareMatrix(rows)) {}

  static DoublyStochasticMatrix identity(std::size_t n);
  /// (1/n)_{n x n}
  static DoublyStochasticMatrix uniform(std::size_t n);
  /// a * I_n + (1 - a) * (1/n)_{n x n}, 0 <= a <= 1.
  static DoublyStochasticMatrix convex_identity_uniform(double a, std::size_t n);
  /// Matrix with ones at (i, perm[i]).
  static DoublyStochasticMatrix permutation(std::span<const std::size_t> perm);

  std::size_t size() const { return m_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  std::span<const double> row(std::size_t i) const { return m_.row(i); }
  const SquareMatrix& matrix() const { return m_; }
  std::vector<double> apply(std::span<const double> x) const { return m_.apply(x); }
  DoublyStochasticMatrix operator*(const DoublyStochasticMatrix& other) const;

  static constexpr double kTolerance = 1e-12;

 private:
  SquareMatrix m_;
};

/// L^k with L^0 the identity.
DoublyStochasticMatrix matrix_power(const DoublyStochasticMatrix& L, unsigned k);

/// Nonnegative weights; `simplex` additionally requires a unit sum within 1e-12.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> weights, bool simplex = true);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& values() const { return w_; }
  operator std::span<const double>() const { return w_; }

  static WeightVector equal(std::size_t n);

 private:
  std::vector<double> w_;
};

}  // namespace riskagg
