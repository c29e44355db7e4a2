#pragma once

#include <optional>
#include <span>
#include <vector>

#include "riskagg/bounds.hpp"
#include "riskagg/distributions.hpp"

namespace riskagg {

struct PMergeResult {
  /// a_{r,w} from the dual evaluated at p = 0.
  double value;
  /// Same constant extrapolated from p in {1e-3, 1e-4, 1e-5}.
  double cross_check;
  /// Set when the two routes differ by more than 1e-3 relative.
  bool flagged;
  BoundResult inner;
};

/// Margins whose worst-case essential infimum determines a_{r,w}:
/// Pareto(-1/r, w_i) for r < 0, w_i Exp(1) for r = 0 and -w_i U^r for r > 0.
/// Zero weights give point masses at 0.
std::vector<Distribution> p_merge_margins(double r, std::span<const double> weights);

/// Multiplier a_{r,w} making a_{r,w} (sum_i w_i p_i^r)^{1/r} a precise merging
/// function (geometric mean for r = 0). Weights must lie on the simplex; r finite.
PMergeResult p_merge_constant(double r, std::span<const double> weights, const OptimizerOptions& opts = {});

enum class RiskMeasure { var, es };

/// Worst-case risk of sum_i lambda_i X_i with every X_i ~ F.
BoundResult portfolio_worst_case(double p, const Distribution& F, std::span<const double> weights,
                                 RiskMeasure measure, const OptimizerOptions& opts = {});

struct Arc {
  double start;
  double length;
};

struct JMCertificate {
  bool feasible = false;
  std::optional<double> center;
  /// Arcs on the unit circle [0, 1); an arc may wrap past 1.
  std::vector<Arc> construction;

  /// Number of arcs covering u in [0, 1).
  int coverage(double u) const;
};

/// Joint mixability of Bernoulli(q_i): feasible iff sum q_i is an integer
/// (within 1e-12). Feasible certificates lay arcs of length q_i end to end.
JMCertificate bernoulli_jm(std::span<const double> q);

/// Mean-length condition for margins with decreasing (or constant) density on
/// a finite support [l_i, h_i]: sum (mu_i - l_i) >= max (h_i - l_i).
/// Throws std::invalid_argument for margins outside that class.
bool mean_length_jm_check(const MarginVector& F);

}  // namespace riskagg
