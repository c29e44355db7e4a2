#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "riskagg/bounds.hpp"
#include "riskagg/distributions.hpp"

namespace riskagg {

enum class GridKind { midpoint, upper };

/// N x n matrix of tail quantiles, stored by column.
struct QuantileMatrix {
  std::vector<std::vector<double>> columns;
  double level = 0.0;
  GridKind kind = GridKind::midpoint;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  std::size_t cols() const { return columns.size(); }
  std::vector<double> row_sums() const;
  void write_csv(std::ostream& os) const;
};

/// Column j, row i holds q_j(p + (1-p)(i - 1/2)/N) (midpoint) or q_j(p + (1-p) i/N)
/// (upper), i = 1..N. The upper grid needs margins with a finite upper end.
QuantileMatrix discretize_tail(double p, std::span<const Distribution> F, std::size_t N,
                               GridKind kind = GridKind::midpoint);

struct RAOptions {
  double eps = 1e-9;
  int max_sweeps = 1000;
  std::uint64_t seed = 42;
};

struct RAResult {
  double lower_var;
  QuantileMatrix matrix;
  int sweeps;
  /// Minimal row sum after the shuffle and after each sweep.
  std::vector<double> history;
};

/// Rearrangement algorithm: shuffle each column, then repeatedly order every
/// column oppositely to the sum of the others until the minimal row sum
/// stops improving by eps * max(1, |m|) over a sweep.
RAResult rearrange(QuantileMatrix Q, const RAOptions& opts = {});

/// discretize_tail + rearrange, packaged as a lower bound.
BoundResult ra_worst_case_var(double p, const MarginVector& F, std::size_t N = 10000,
                              const RAOptions& opts = {});

}  // namespace riskagg
