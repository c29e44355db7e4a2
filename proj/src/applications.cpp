#include "riskagg/applications.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "riskagg/matrix.hpp"

namespace riskagg {
namespace {

// a_{r,w} from the worst-case essential infimum S of the transformed margins
double merge_transform(double r, double S) {
  if (r < 0.0) return std::pow(S, -1.0 / r);
  if (r == 0.0) return std::exp(S);
  // r > 0: the margins are negated, so S = -inf_dep esssup(sum w_i P_i^r)
  return std::pow(-S, -1.0 / r);
}

}  // namespace

std::vector<Distribution> p_merge_margins(double r, std::span<const double> weights) {
  if (!std::isfinite(r)) throw std::invalid_argument("p_merge: r must be finite");
  std::vector<Distribution> out;
  for (double w : weights) {
    if (w == 0.0) {
      out.push_back(Distribution::point_mass(0.0));
    } else if (r < 0.0) {
      out.push_back(Distribution::pareto(-1.0 / r, w));  // w P^r
    } else if (r == 0.0) {
      out.push_back(Distribution::exponential(1.0).scaled(w));  // w log(1/P)
    } else {
      out.push_back(Distribution::power_function(1.0 / r).scaled(w).negated());  // -w P^r
    }
  }
  return out;
}

PMergeResult p_merge_constant(double r, std::span<const double> weights, const OptimizerOptions& opts) {
  const WeightVector w(std::vector<double>(weights.begin(), weights.end()));
  if (!std::isfinite(r)) throw std::invalid_argument("p_merge: r must be finite");
  if (w.size() == 1) {
    BoundResult trivial;
    trivial.value = r > 0.0 ? -1.0 : (r == 0.0 ? 0.0 : 1.0);
    trivial.converged = true;
    trivial.exactness = Exactness::exact;
    trivial.method = BoundMethod::dual_exact;
    return {1.0, 1.0, false, trivial};
  }
  const MarginVector F(p_merge_margins(r, weights));
  PMergeResult out;
  out.inner = essential_infimum_worst_case(F, opts);
  if (!std::isfinite(out.inner.value)) throw std::runtime_error("p_merge: worst-case essential infimum diverges");
  out.value = merge_transform(r, out.inner.value);

  // quadratic extrapolation to p = 0 through three small levels
  const double xs[3] = {1e-3, 1e-4, 1e-5};
  double v0 = 0.0;
  for (int i = 0; i < 3; ++i) {
    double li = 1.0;
    for (int j = 0; j < 3; ++j) {
      if (j != i) li *= xs[j] / (xs[j] - xs[i]);
    }
    v0 += li * worst_case_var(xs[i], F, opts).value;
  }
  out.cross_check = merge_transform(r, v0);
  out.flagged = !(std::abs(out.cross_check - out.value) <= 1e-3 * std::abs(out.value));
  return out;
}

BoundResult portfolio_worst_case(double p, const Distribution& F, std::span<const double> weights,
                                 RiskMeasure measure, const OptimizerOptions& opts) {
  const WeightVector w(std::vector<double>(weights.begin(), weights.end()));
  std::vector<Distribution> margins;
  for (double lambda : w.values()) margins.push_back(F.scaled(lambda));
  const MarginVector M(std::move(margins));
  if (measure == RiskMeasure::var) return worst_case_var(p, M, opts);
  BoundResult r;
  r.value = worst_case_es(p, M);
  r.method = BoundMethod::comonotonic_es;
  r.exactness = Exactness::exact;
  r.converged = true;
  return r;
}

int JMCertificate::coverage(double u) const {
  int count = 0;
  for (const auto& a : construction) {
    if (a.length >= 1.0) {
      ++count;
      continue;
    }
    double offset = u - a.start;
    if (offset < 0.0) offset += 1.0;
    if (offset < a.length) ++count;
  }
  return count;
}

JMCertificate bernoulli_jm(std::span<const double> q) {
  double total = 0.0;
  for (double v : q) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("bernoulli_jm: parameters must lie in [0, 1]");
    total += v;
  }
  JMCertificate cert;
  const double k = std::round(total);
  cert.feasible = std::abs(total - k) <= 1e-12;
  if (!cert.feasible) return cert;
  cert.center = k;
  double cursor = 0.0;
  for (double v : q) {
    cert.construction.push_back({cursor - std::floor(cursor), v});
    cursor += v;
  }
  return cert;
}

bool mean_length_jm_check(const MarginVector& F) {
  double mean_excess = 0.0;
  double longest = 0.0;
  for (const auto& m : F) {
    const Support s = m.support();
    if (!std::isfinite(s.lower) || !std::isfinite(s.upper)) {
      throw std::invalid_argument("mean_length_jm_check: margins need a bounded support");
    }
    const DensityClass c = m.density_class();
    if (c != DensityClass::decreasing && c != DensityClass::constant) {
      throw std::invalid_argument("mean_length_jm_check: margins need a decreasing density");
    }
    // shifting to [0, h - l] leaves joint mixability unchanged
    mean_excess += m.mean() - s.lower;
    longest = std::max(longest, s.upper - s.lower);
  }
  return mean_excess >= longest - 1e-12 * std::max(1.0, longest);
}

}  // namespace riskagg
