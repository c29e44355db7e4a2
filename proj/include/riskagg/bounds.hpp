#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "riskagg/distributions.hpp"

namespace riskagg {

/// Point of B_n = {beta in [0,1)^n : sum beta < 1}, with slack 1 - sum beta >= 1e-12.
class BetaVector {
 public:
  explicit BetaVector(std::vector<double> beta);
  /// Builds from beta and an explicitly known slack (avoids cancellation in 1 - sum).
  BetaVector(std::vector<double> beta, double slack);

  static BetaVector zero(std::size_t n) { return BetaVector(std::vector<double>(n, 0.0), 1.0); }

  std::size_t size() const { return beta_.size(); }
  double operator[](std::size_t i) const { return beta_[i]; }
  const std::vector<double>& values() const { return beta_; }
  double slack() const { return slack_; }

  static constexpr double kMinSlack = 1e-12;

 private:
  std::vector<double> beta_;
  double slack_;
};

enum class BoundMethod { dual_exact, dual_upper_bound, comonotonic_es, analytic_pareto, ra_lower };
enum class Exactness { exact, upper_bound, lower_bound };

const char* to_string(BoundMethod m);
const char* to_string(Exactness e);

struct BoundResult {
  double value = kInfinity;
  BoundMethod method = BoundMethod::dual_upper_bound;
  std::optional<BetaVector> beta_star;
  long evaluations = 0;
  bool converged = false;
  Exactness exactness = Exactness::upper_bound;
  /// Largest relative gap between a restart's result and the best value.
  double restart_spread = 0.0;
  /// Final value of every optimizer start, in start order.
  std::vector<double> start_values;
};

struct OptimizerOptions {
  int restarts = 20;
  std::uint64_t seed = 42;
  int max_evals = 5000;
  double tol = 1e-10;
  /// Worker threads for the restarts; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

/// Relative disagreement between restarts above which a result is flagged
/// as not converged.
inline constexpr double kRestartAgreement = 1e-4;

/// The dual objective
///   sum_i 1/((1-p)(1-beta)) int_{p+(1-p)(beta-beta_i)}^{1-(1-p)beta_i} q_i(u) du
/// with beta = sum_i beta_i. Accepts p in [0, 1); p = 0 gives the
/// essential-infimum version. +inf propagates from divergent integrals.
double dual_objective(double p, const MarginVector& F, const BetaVector& beta);

/// Infimum of the dual objective over B_n. Exact when every p-tail has a
/// decreasing density or every p-tail has an increasing density; an upper
/// bound otherwise. Deterministic for a fixed seed.
BoundResult worst_case_var(double p, const MarginVector& F, const OptimizerOptions& opts = {});

/// Sum of ES_p of the margins (ES of the comonotonic sum).
double worst_case_es(double p, const MarginVector& F);

/// Lower and upper analytic bounds on the worst-case VaR of Pareto(alpha, theta_i)
/// margins: sum(theta)(1-p)^{-1/alpha} times 1 and alpha/(alpha-1). Requires alpha > 1.
std::pair<double, double> pareto_var_bounds(double p, double alpha, std::span<const double> theta);

/// Limit of worst_case_var as p decreases to 0, via the dual at p = 0.
BoundResult essential_infimum_worst_case(const MarginVector& F, const OptimizerOptions& opts = {});

}  // namespace riskagg
