#include "riskagg/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "riskagg/nelder_mead.hpp"

namespace riskagg {
namespace {

// Mean of q over [a, b]. Short intervals on atomless laws use Gauss-Legendre
// so the average never divides a cancelled difference by a tiny width.
double interval_mean(const DistributionModel& m, double a, double b) {
  const double h = b - a;
  if (!(h > 0.0)) return m.quantile(a);
  if (b < 1.0 && h < 1e-3 * (1.0 - a) && m.atomless()) {
    static constexpr double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                    0.9061798459386640};
    static constexpr double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                    0.4786286704993665, 0.2369268850561891};
    double total = 0.0;
    for (int k = 0; k < 5; ++k) total += w[k] * m.quantile(a + 0.5 * h * (1.0 + x[k]));
    return 0.5 * total;
  }
  return m.quantile_integral(a, b) / h;
}

double objective(double p, const MarginVector& F, std::span<const double> beta, double slack) {
  if (!(slack >= BetaVector::kMinSlack)) return kInfinity;
  const double w = 1.0 - p;
  double total = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    // limits written as 1 - (1-p)(slack + beta_i) and 1 - (1-p) beta_i
    const double a = std::clamp(1.0 - w * (slack + beta[i]), 0.0, 1.0);
    const double b = std::clamp(1.0 - w * beta[i], 0.0, 1.0);
    total += interval_mean(F[i].model(), a, b);
    if (std::isinf(total)) return total;
  }
  return total;
}

// beta_i = e^{z_i} / (1 + sum_j e^{z_j}); the slack coordinate has logit 0
void from_logits(std::span<const double> z, std::vector<double>& beta, double& slack) {
  double m = 0.0;
  for (double v : z) m = std::max(m, v);
  double denom = std::exp(-m);
  beta.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    beta[i] = std::exp(z[i] - m);
    denom += beta[i];
  }
  for (double& b : beta) b /= denom;
  slack = std::exp(-m) / denom;
}

std::vector<double> to_logits(std::span<const double> beta, double slack) {
  std::vector<double> z(beta.size());
  for (std::size_t i = 0; i < beta.size(); ++i) z[i] = std::log(beta[i] / slack);
  return z;
}

constexpr std::size_t kStructuredStarts = 2;

struct StartOutcome {
  double value = kInfinity;
  std::vector<double> beta;
  double slack = 1.0;
  long evaluations = 0;
  bool converged = false;
};

Exactness exactness_for(double p, const MarginVector& F) {
  return F.tail_density_class(p) == MarginClass::mixed ? Exactness::upper_bound : Exactness::exact;
}

BoundResult minimize_dual(double p, const MarginVector& F, const OptimizerOptions& opts) {
  if (opts.restarts < 0 || opts.max_evals <= 0 || !(opts.tol > 0.0)) {
    throw std::invalid_argument("optimizer options out of range");
  }
  const std::size_t n = F.size();
  auto f_logits = [&](const std::vector<double>& z) {
    std::vector<double> beta;
    double slack;
    from_logits(z, beta, slack);
    return objective(p, F, beta, slack);
  };

  // symmetric line search beta_i = c/n supplies one structured start
  long line_evals = 0;
  auto f_sym = [&](double c) {
    ++line_evals;
    std::vector<double> beta(n, c / static_cast<double>(n));
    return objective(p, F, beta, 1.0 - c);
  };
  const auto [c_star, f_c] = boost::math::tools::brent_find_minima(f_sym, 1e-9, 1.0 - 1e-9, 40);
  (void)f_c;

  std::vector<std::vector<double>> starts;
  {
    const double tiny = 1e-6;
    std::vector<double> beta(n, tiny);
    starts.push_back(to_logits(beta, 1.0 - tiny * static_cast<double>(n)));
  }
  {
    const double c = std::clamp(c_star, 1e-8, 1.0 - 1e-8);
    std::vector<double> beta(n, c / static_cast<double>(n));
    starts.push_back(to_logits(beta, 1.0 - c));
  }
  for (int r = 0; r < opts.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> e(n + 1);
    for (double& v : e) v = expo(rng);
    const double total = std::accumulate(e.begin(), e.end(), 0.0);
    std::vector<double> beta(n);
    for (std::size_t i = 0; i < n; ++i) beta[i] = e[i] / total;
    starts.push_back(to_logits(beta, e[n] / total));
  }

  NelderMeadOptions nm;
  nm.max_evals = opts.max_evals;
  nm.tol = opts.tol;
  std::vector<StartOutcome> outcomes(starts.size());
  auto run_start = [&](std::size_t s) {
    const auto res = nelder_mead(f_logits, starts[s], nm);
    StartOutcome& out = outcomes[s];
    out.value = res.value;
    from_logits(res.x, out.beta, out.slack);
    out.evaluations = res.evaluations;
    out.converged = res.converged;
  };

  unsigned workers = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(starts.size()));
  if (workers <= 1) {
    for (std::size_t s = 0; s < starts.size(); ++s) run_start(s);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t s = next++; s < starts.size(); s = next++) run_start(s);
      });
    }
    for (auto& t : pool) t.join();
  }

  BoundResult result;
  result.evaluations = line_evals + 1;
  const double at_zero = objective(p, F, std::vector<double>(n, 0.0), 1.0);
  std::size_t best = outcomes.size();
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    result.evaluations += outcomes[s].evaluations;
    result.start_values.push_back(outcomes[s].value);
    if (best == outcomes.size() || outcomes[s].value < outcomes[best].value) best = s;
  }
  const StartOutcome& b = outcomes[best];
  if (std::isfinite(at_zero) && at_zero <= b.value) {
    result.value = at_zero;
    result.beta_star = BetaVector::zero(n);
  } else {
    result.value = b.value;
    if (std::isfinite(b.value)) result.beta_star = BetaVector(b.beta, b.slack);
  }

  // agreement is judged on the random restarts; the structured starts only
  // seed the search (the near-zero one crawls in logit space)
  const std::size_t first_random = opts.restarts > 0 ? kStructuredStarts : 0;
  double spread = 0.0;
  for (std::size_t s = first_random; s < outcomes.size(); ++s) {
    const auto& o = outcomes[s];
    if (!std::isfinite(o.value) || !std::isfinite(result.value)) continue;
    spread = std::max(spread, (o.value - result.value) / std::max(std::abs(result.value), 1e-300));
  }
  result.restart_spread = spread;
  result.converged = std::isfinite(result.value) && spread <= kRestartAgreement &&
                     std::any_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.converged; });
  if (!std::isfinite(result.value)) result.converged = std::isinf(at_zero) && std::isinf(b.value);
  result.exactness = exactness_for(p, F);
  result.method = result.exactness == Exactness::exact ? BoundMethod::dual_exact : BoundMethod::dual_upper_bound;
  return result;
}

}  // namespace

BetaVector::BetaVector(std::vector<double> beta) : beta_(std::move(beta)) {
  double total = 0.0;
  for (double b : beta_) total += b;
  slack_ = 1.0 - total;
  for (double b : beta_) {
    if (!(b >= 0.0 && b < 1.0)) throw std::invalid_argument("BetaVector: entries must lie in [0, 1)");
  }
  if (!(slack_ >= kMinSlack)) throw std::invalid_argument("BetaVector: entries must sum to less than 1");
}

BetaVector::BetaVector(std::vector<double> beta, double slack) : beta_(std::move(beta)), slack_(slack) {
  double total = 0.0;
  for (double b : beta_) {
    if (!(b >= 0.0 && b < 1.0)) throw std::invalid_argument("BetaVector: entries must lie in [0, 1)");
    total += b;
  }
  if (!(slack_ >= kMinSlack) || std::abs(total + slack_ - 1.0) > 1e-9) {
    throw std::invalid_argument("BetaVector: slack inconsistent with entries");
  }
}

const char* to_string(BoundMethod m) {
  switch (m) {
    case BoundMethod::dual_exact: return "dual_exact";
    case BoundMethod::dual_upper_bound: return "dual_upper_bound";
    case BoundMethod::comonotonic_es: return "comonotonic_es";
    case BoundMethod::analytic_pareto: return "analytic_pareto";
    case BoundMethod::ra_lower: return "ra_lower";
  }
  return "?";
}

const char* to_string(Exactness e) {
  switch (e) {
    case Exactness::exact: return "exact";
    case Exactness::upper_bound: return "upper_bound";
    case Exactness::lower_bound: return "lower_bound";
  }
  return "?";
}

double dual_objective(double p, const MarginVector& F, const BetaVector& beta) {
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("dual_objective: p must lie in [0, 1)");
  if (beta.size() != F.size()) throw std::invalid_argument("dual_objective: dimension mismatch");
  return objective(p, F, beta.values(), beta.slack());
}

BoundResult worst_case_var(double p, const MarginVector& F, const OptimizerOptions& opts) {
  detail::require_probability_open(p, "worst_case_var");
  return minimize_dual(p, F, opts);
}

double worst_case_es(double p, const MarginVector& F) {
  detail::require_probability_open(p, "worst_case_es");
  double total = 0.0;
  for (const auto& m : F) total += m.expected_shortfall(p);
  return total;
}

std::pair<double, double> pareto_var_bounds(double p, double alpha, std::span<const double> theta) {
  detail::require_probability_open(p, "pareto_var_bounds");
  if (!(alpha > 1.0)) throw std::domain_error("pareto_var_bounds: alpha must exceed 1");
  double total = 0.0;
  for (double t : theta) {
    if (!(t > 0.0)) throw std::invalid_argument("pareto_var_bounds: theta must be positive");
    total += t;
  }
  const double lower = total * std::pow(1.0 - p, -1.0 / alpha);
  return {lower, alpha / (alpha - 1.0) * lower};
}

BoundResult essential_infimum_worst_case(const MarginVector& F, const OptimizerOptions& opts) {
  return minimize_dual(0.0, F, opts);
}

}  // namespace riskagg
