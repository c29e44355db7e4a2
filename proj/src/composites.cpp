#include "riskagg/composites.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace riskagg {
namespace {

constexpr double kRelTol = 1e-12;
constexpr int kMaxBisection = 200;

bool within_tolerance(double lo, double hi) {
  return hi - lo <= kRelTol * std::max(std::abs(lo), std::abs(hi)) || hi - lo < 1e-300;
}

std::string describe_components(const char* name, const std::vector<WeightedComponent>& parts) {
  std::ostringstream os;
  os.precision(6);
  os << name << '[';
  for (std::size_t j = 0; j < parts.size(); ++j) {
    if (j) os << " + ";
    os << parts[j].weight << '*' << parts[j].component.describe();
  }
  os << ']';
  return os.str();
}

}  // namespace

// ------------------------------------------------------------------ MixtureModel

MixtureModel::MixtureModel(std::vector<WeightedComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("mixture: no components");
  for (const auto& c : components_) {
    if (!(c.weight > 0.0)) throw std::invalid_argument("mixture: weights must be positive");
  }
}

double MixtureModel::cdf(double x) const {
  double total = 0.0;
  for (const auto& c : components_) total += c.weight * c.component.cdf(x);
  return std::min(total, 1.0);
}

double MixtureModel::cdf_left(double x) const {
  double total = 0.0;
  for (const auto& c : components_) total += c.weight * c.component.model().cdf_left(x);
  return std::min(total, 1.0);
}

double MixtureModel::survival(double x) const {
  double total = 0.0;
  for (const auto& c : components_) total += c.weight * c.component.survival(x);
  return std::min(total, 1.0);
}

double MixtureModel::quantile(double u) const {
  if (u <= 0.0) return support().lower;
  if (u >= 1.0) return support().upper;
  double lo = kInfinity;
  double hi = -kInfinity;
  for (const auto& c : components_) {
    const double q = c.component.model().quantile(u);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  // F(x) >= u, evaluated on the survival side in the upper half for accuracy
  const double tail = 1.0 - u;
  auto reached = [&](double x) { return u > 0.5 ? survival(x) <= tail : cdf(x) >= u; };
  if (reached(lo)) return lo;
  for (int it = 0; it < kMaxBisection && !within_tolerance(lo, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (reached(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double MixtureModel::upper_quantile(double u) const {
  if (u >= 1.0) return support().upper;
  if (u <= 0.0) u = 0.0;
  double lo = kInfinity;
  double hi = -kInfinity;
  for (const auto& c : components_) {
    lo = std::min(lo, c.component.model().quantile(u));
    hi = std::max(hi, c.component.model().upper_quantile(u));
  }
  const double tail = 1.0 - u;
  auto exceeded = [&](double x) { return u > 0.5 ? survival(x) < tail : cdf(x) > u; };
  if (!exceeded(hi)) return hi;
  if (exceeded(lo)) return lo;
  for (int it = 0; it < kMaxBisection && !within_tolerance(lo, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (exceeded(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double MixtureModel::quantile_integral(double a, double b) const {
  if (b <= a) return 0.0;
  const double xa = quantile(a);
  if (b >= 1.0) {
    double tail = 0.0;
    for (const auto& c : components_) {
      tail += c.weight * c.component.model().integrated_survival(xa, kInfinity);
    }
    return (1.0 - a) * xa + tail;
  }
  const double xb = quantile(b);
  double body = 0.0;
  for (const auto& c : components_) {
    body += c.weight * c.component.model().integrated_survival(xa, xb);
  }
  return (1.0 - a) * xa - (1.0 - b) * xb + body;
}

double MixtureModel::integrated_survival(double x0, double x1) const {
  double total = 0.0;
  for (const auto& c : components_) {
    total += c.weight * c.component.model().integrated_survival(x0, x1);
  }
  return total;
}

double MixtureModel::mean() const {
  double total = 0.0;
  for (const auto& c : components_) total += c.weight * c.component.mean();
  return total;
}

Support MixtureModel::support() const {
  Support s{kInfinity, -kInfinity};
  for (const auto& c : components_) {
    const Support cs = c.component.support();
    s.lower = std::min(s.lower, cs.lower);
    s.upper = std::max(s.upper, cs.upper);
  }
  return s;
}

DensityClass MixtureModel::density_class_on(double a, double b) const {
  const double xa = quantile(a);
  const double xb = b >= 1.0 ? support().upper : quantile(b);
  bool dec = true;
  bool inc = true;
  for (const auto& c : components_) {
    const auto& m = c.component.model();
    const double ua = m.cdf(xa);
    const double ub = b >= 1.0 ? 1.0 : m.cdf(xb);
    if (!(ub > ua)) continue;
    if (!m.atomless()) return DensityClass::none;
    switch (m.density_class_on(ua, ub)) {
      case DensityClass::decreasing: inc = false; break;
      case DensityClass::increasing: dec = false; break;
      case DensityClass::constant: break;
      case DensityClass::none: return DensityClass::none;
    }
    const Support cs = m.support();
    if (cs.lower > xa) dec = false;  // density jumps up where this component starts
    if (cs.upper < xb) inc = false;  // and drops where it ends
  }
  if (dec && inc) return DensityClass::constant;
  if (dec) return DensityClass::decreasing;
  if (inc) return DensityClass::increasing;
  return DensityClass::none;
}

bool MixtureModel::atomless() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const auto& c) { return c.component.model().atomless(); });
}

std::string MixtureModel::describe() const { return describe_components("Mixture", components_); }

// ------------------------------------------------------------------ QuantileSumModel

QuantileSumModel::QuantileSumModel(std::vector<WeightedComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("quantile sum: no components");
  for (const auto& c : components_) {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
      throw std::invalid_argument("quantile sum: weights must be positive");
    }
  }
}

double QuantileSumModel::quantile(double u) const {
  double total = 0.0;
  for (const auto& c : components_) total += c.weight * c.component.model().quantile(u);
  return total;
}

double QuantileSumModel::upper_quantile(double u) const {
  double total = 0.0;
  for (const auto& c : components_) total += c.weight * c.component.model().upper_quantile(u);
  return total;
}

double QuantileSumModel::cdf(double x) const {
  // sup{u : q(u) <= x}
  if (quantile(0.0) > x) return 0.0;
  if (quantile(1.0) <= x) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 100 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (quantile(mid) <= x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double QuantileSumModel::cdf_left(double x) const {
  // sup{u : q(u) < x}
  if (quantile(0.0) >= x) return 0.0;
  if (quantile(1.0) < x) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 100 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (quantile(mid) < x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double QuantileSumModel::quantile_integral(double a, double b) const {
  double total = 0.0;
  for (const auto& c : components_) total += c.weight * c.component.model().quantile_integral(a, b);
  return total;
}

double QuantileSumModel::mean() const {
  double total = 0.0;
  for (const auto& c : components_) total += c.weight * c.component.mean();
  return total;
}

Support QuantileSumModel::support() const { return {quantile(0.0), quantile(1.0)}; }

DensityClass QuantileSumModel::density_class_on(double a, double b) const {
  // A convex (concave) quantile is a decreasing (increasing) density, and
  // positive combinations preserve convexity.
  DensityClass acc = DensityClass::constant;
  for (const auto& c : components_) acc = meet(acc, c.component.model().density_class_on(a, b));
  return acc;
}

bool QuantileSumModel::atomless() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const auto& c) { return c.component.model().atomless(); });
}

std::optional<ParetoForm> QuantileSumModel::pareto_form() const {
  std::optional<ParetoForm> acc;
  for (const auto& c : components_) {
    const auto pf = c.component.pareto_form();
    if (!pf) return std::nullopt;
    if (!acc) {
      acc = ParetoForm{pf->alpha, 0.0};
    } else if (acc->alpha != pf->alpha) {
      return std::nullopt;
    }
    acc->theta += c.weight * pf->theta;
  }
  return acc;
}

std::string QuantileSumModel::describe() const {
  return describe_components("QuantileSum", components_);
}

// ------------------------------------------------------------------ AffineModel

AffineModel::AffineModel(Distribution base, double shift, double scale)
    : base_(std::move(base)), shift_(shift), scale_(scale) {
  if (!std::isfinite(shift) || !std::isfinite(scale) || scale == 0.0) {
    throw std::invalid_argument("affine: need finite shift and nonzero finite scale");
  }
}

double AffineModel::cdf(double x) const {
  const double y = (x - shift_) / scale_;
  return scale_ > 0.0 ? base_.cdf(y) : base_.survival(y) + (base_.cdf(y) - base_.model().cdf_left(y));
}

double AffineModel::cdf_left(double x) const {
  const double y = (x - shift_) / scale_;
  return scale_ > 0.0 ? base_.model().cdf_left(y) : base_.survival(y);
}

double AffineModel::survival(double x) const {
  const double y = (x - shift_) / scale_;
  return scale_ > 0.0 ? base_.survival(y) : base_.model().cdf_left(y);
}

double AffineModel::quantile(double u) const {
  if (scale_ > 0.0) return shift_ + scale_ * base_.model().quantile(u);
  return shift_ + scale_ * base_.model().upper_quantile(1.0 - u);
}

double AffineModel::upper_quantile(double u) const {
  if (scale_ > 0.0) return shift_ + scale_ * base_.model().upper_quantile(u);
  return shift_ + scale_ * base_.model().quantile(1.0 - u);
}

double AffineModel::quantile_integral(double a, double b) const {
  if (b <= a) return 0.0;
  const double inner = scale_ > 0.0 ? base_.model().quantile_integral(a, b)
                                    : base_.model().quantile_integral(1.0 - b, 1.0 - a);
  return shift_ * (b - a) + scale_ * inner;
}

double AffineModel::mean() const { return shift_ + scale_ * base_.mean(); }

Support AffineModel::support() const {
  const Support s = base_.support();
  if (scale_ > 0.0) return {shift_ + scale_ * s.lower, shift_ + scale_ * s.upper};
  return {shift_ + scale_ * s.upper, shift_ + scale_ * s.lower};
}

DensityClass AffineModel::density_class_on(double a, double b) const {
  if (scale_ > 0.0) return base_.model().density_class_on(a, b);
  return flip(base_.model().density_class_on(1.0 - b, 1.0 - a));
}

std::optional<ParetoForm> AffineModel::pareto_form() const {
  if (shift_ != 0.0 || scale_ < 0.0) return std::nullopt;
  auto pf = base_.pareto_form();
  if (pf) pf->theta *= scale_;
  return pf;
}

std::string AffineModel::describe() const {
  std::ostringstream os;
  os.precision(12);
  os << "Affine(" << shift_ << " + " << scale_ << " * " << base_.describe() << ')';
  return os.str();
}

// ------------------------------------------------------------------ PTailModel

PTailModel::PTailModel(Distribution base, double p) : base_(std::move(base)), p_(p) {
  detail::require_probability_open(p, "p_tail");
}

double PTailModel::cdf(double x) const {
  return std::clamp((base_.cdf(x) - p_) / (1.0 - p_), 0.0, 1.0);
}

double PTailModel::cdf_left(double x) const {
  return std::clamp((base_.model().cdf_left(x) - p_) / (1.0 - p_), 0.0, 1.0);
}

double PTailModel::survival(double x) const {
  return std::clamp(base_.survival(x) / (1.0 - p_), 0.0, 1.0);
}

double PTailModel::quantile(double u) const { return base_.model().quantile(lift(u)); }

double PTailModel::upper_quantile(double u) const {
  return base_.model().upper_quantile(lift(u));
}

double PTailModel::quantile_integral(double a, double b) const {
  if (b <= a) return 0.0;
  return base_.model().quantile_integral(lift(a), lift(b)) / (1.0 - p_);
}

Support PTailModel::support() const { return {quantile(0.0), base_.support().upper}; }

DensityClass PTailModel::density_class_on(double a, double b) const {
  return base_.model().density_class_on(lift(a), lift(b));
}

std::optional<ParetoForm> PTailModel::pareto_form() const {
  auto pf = base_.pareto_form();
  if (pf) pf->theta *= std::pow(1.0 - p_, -1.0 / pf->alpha);
  return pf;
}

std::string PTailModel::describe() const {
  std::ostringstream os;
  os.precision(12);
  os << "PTail(" << p_ << ", " << base_.describe() << ')';
  return os.str();
}

// ------------------------------------------------------------------ factories

Distribution make_mixture(std::vector<WeightedComponent> components) {
  std::erase_if(components, [](const auto& c) { return c.weight == 0.0; });
  if (components.size() == 1) return components.front().component;
  return Distribution(std::make_shared<MixtureModel>(std::move(components)));
}

Distribution make_quantile_sum(std::vector<WeightedComponent> components) {
  std::erase_if(components, [](const auto& c) { return c.weight == 0.0; });
  if (components.empty()) return Distribution::point_mass(0.0);
  if (components.size() == 1) return components.front().component.scaled(components.front().weight);
  auto model = std::make_shared<QuantileSumModel>(std::move(components));
  if (auto pf = model->pareto_form()) return Distribution::pareto(pf->alpha, pf->theta);
  return Distribution(std::move(model));
}

}  // namespace riskagg
