#pragma once

#include <functional>
#include <vector>

namespace riskagg {

struct NelderMeadOptions {
  int max_evals = 5000;
  /// Stop once the simplex values agree to this relative tolerance.
  double tol = 1e-10;
  double initial_step = 1.0;
  /// Rebuild the simplex around the best point after convergence, at most
  /// this many times; stops early once a rebuild brings no improvement.
  int restarts_at_best = 10;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value;
  int evaluations;
  bool converged;
};

/// Unconstrained minimization. The objective may return +inf to mark
/// infeasible points; those are never accepted over finite values.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts = {});

}  // namespace riskagg
