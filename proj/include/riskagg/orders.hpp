#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "riskagg/distributions.hpp"
#include "riskagg/matrix.hpp"

namespace riskagg {

/// True iff gam is majorized by lam: sorted-descending partial sums of gam
/// never exceed those of lam. Sums must agree within 1e-10.
bool majorizes(std::span<const double> lam, std::span<const double> gam);

/// A doubly stochastic L with gam = L lam, built from T-transforms.
/// Throws std::domain_error when lam does not majorize gam.
DoublyStochasticMatrix majorization_matrix(std::span<const double> lam, std::span<const double> gam);

struct BirkhoffTerm {
  double weight;
  /// Row i maps to column permutation[i].
  std::vector<std::size_t> permutation;
};

struct BirkhoffDecomposition {
  std::vector<BirkhoffTerm> terms;

  SquareMatrix reconstruct() const;
  std::string to_string() const;
};

/// Greedy Birkhoff–von Neumann decomposition. Throws std::runtime_error when
/// no perfect matching exists on the positive residual entries.
BirkhoffDecomposition birkhoff(const DoublyStochasticMatrix& L);

/// 512 equally spaced levels plus 64 geometric levels toward each endpoint.
const std::vector<double>& default_probability_grid();

/// Stochastic order F <=_st G checked in quantile space on the grid.
/// `rel_tol` allows q_F(u) <= q_G(u) * (1 + rel_tol) style slack.
bool stochastic_order_leq(const Distribution& F, const Distribution& G,
                          std::span<const double> grid = default_probability_grid(),
                          double rel_tol = 0.0);

/// Convex order F <=_cx G checked as ES_p(F) <= ES_p(G) + 1e-9 on the grid.
/// Both laws need finite and equal (within 1e-8) means.
bool convex_order_leq(const Distribution& F, const Distribution& G,
                      std::span<const double> grid = default_probability_grid());

}  // namespace riskagg
