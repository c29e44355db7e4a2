#pragma once

#include "riskagg/distributions.hpp"
#include "riskagg/matrix.hpp"

namespace riskagg {

/// Lambda F: component i is the cdf mixture sum_j L_ij F_j.
MarginVector distribution_mixture(const DoublyStochasticMatrix& L, const MarginVector& F);

/// Lambda (x) F: component i has quantile sum_j L_ij F_j^{-1}.
///
/// Common-alpha Pareto margins map to exact Pareto(alpha, L theta) components.
MarginVector quantile_mixture(const DoublyStochasticMatrix& L, const MarginVector& F);

/// Quantile mixture under a general nonnegative matrix. Only defined for
/// Pareto margins sharing one alpha; anything else is rejected.
MarginVector quantile_mixture(const SquareMatrix& L, const MarginVector& F);

}  // namespace riskagg
