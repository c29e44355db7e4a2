#include "riskagg/distributions.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "riskagg/composites.hpp"

namespace riskagg {

DensityClass meet(DensityClass a, DensityClass b) {
  if (a == DensityClass::constant) return b;
  if (b == DensityClass::constant) return a;
  if (a == b) return a;
  return DensityClass::none;
}

DensityClass flip(DensityClass c) {
  switch (c) {
    case DensityClass::decreasing: return DensityClass::increasing;
    case DensityClass::increasing: return DensityClass::decreasing;
    default: return c;
  }
}

const char* to_string(DensityClass c) {
  switch (c) {
    case DensityClass::decreasing: return "decreasing";
    case DensityClass::increasing: return "increasing";
    case DensityClass::constant: return "constant";
    case DensityClass::none: return "none";
  }
  return "?";
}

const char* to_string(Family f) {
  switch (f) {
    case Family::pareto: return "pareto";
    case Family::uniform: return "uniform";
    case Family::gamma: return "gamma";
    case Family::weibull: return "weibull";
    case Family::lognormal: return "lognormal";
    case Family::binomial: return "binomial";
    case Family::bernoulli: return "bernoulli";
    case Family::point_mass: return "point_mass";
    case Family::exponential: return "exponential";
    case Family::power_function: return "power_function";
  }
  return "?";
}

const char* to_string(MarginClass c) {
  switch (c) {
    case MarginClass::all_decreasing: return "all_decreasing";
    case MarginClass::all_increasing: return "all_increasing";
    case MarginClass::mixed: return "mixed";
  }
  return "?";
}

namespace detail {

void require_probability_open(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error(std::string(what) + ": probability must lie in (0, 1)");
  }
}

void require_probability_closed(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error(std::string(what) + ": probability must lie in [0, 1]");
  }
}

}  // namespace detail

double DistributionModel::integrated_survival(double x0, double x1) const {
  if (!(x1 > x0)) return 0.0;
  // int_{x0}^{x1} S = int_0^1 (clamp(q(u), x0, x1) - x0) du
  const double s0 = survival(x0);
  if (std::isinf(x1)) {
    return quantile_integral(1.0 - s0, 1.0) - x0 * s0;
  }
  const double s1 = survival(x1);
  return quantile_integral(1.0 - s0, 1.0 - s1) - x0 * (s0 - s1) + s1 * (x1 - x0);
}

Distribution::Distribution(std::shared_ptr<const DistributionModel> model) : model_(std::move(model)) {
  if (!model_) throw std::invalid_argument("Distribution: null model");
}

double Distribution::quantile(double p) const {
  detail::require_probability_open(p, "quantile");
  return model_->quantile(p);
}

double Distribution::upper_quantile(double p) const {
  detail::require_probability_open(p, "upper_quantile");
  return model_->upper_quantile(p);
}

double Distribution::quantile_integral(double a, double b) const {
  detail::require_probability_closed(a, "quantile_integral");
  detail::require_probability_closed(b, "quantile_integral");
  if (a > b) throw std::invalid_argument("quantile_integral: lower limit exceeds upper limit");
  return model_->quantile_integral(a, b);
}

double Distribution::expected_shortfall(double p) const {
  detail::require_probability_open(p, "expected_shortfall");
  return model_->quantile_integral(p, 1.0) / (1.0 - p);
}

bool Distribution::has_finite_mean() const { return std::isfinite(model_->mean()); }

Distribution Distribution::shifted(double x) const {
  if (!std::isfinite(x)) throw std::invalid_argument("shifted: shift must be finite");
  if (x == 0.0) return *this;
  if (auto affine = std::dynamic_pointer_cast<const AffineModel>(model_)) {
    return Distribution(
        std::make_shared<AffineModel>(affine->base(), affine->shift() + x, affine->scale()));
  }
  return Distribution(std::make_shared<AffineModel>(*this, x, 1.0));
}

Distribution Distribution::scaled(double lambda) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("scaled: factor must be finite and nonnegative");
  }
  if (lambda == 1.0) return *this;
  if (lambda == 0.0) return point_mass(0.0);
  if (auto affine = std::dynamic_pointer_cast<const AffineModel>(model_)) {
    return Distribution(std::make_shared<AffineModel>(affine->base(), lambda * affine->shift(),
                                                      lambda * affine->scale()));
  }
  return Distribution(std::make_shared<AffineModel>(*this, 0.0, lambda));
}

Distribution Distribution::negated() const {
  if (auto affine = std::dynamic_pointer_cast<const AffineModel>(model_)) {
    if (affine->scale() == -1.0 && affine->shift() == 0.0) return affine->base();
    return Distribution(
        std::make_shared<AffineModel>(affine->base(), -affine->shift(), -affine->scale()));
  }
  return Distribution(std::make_shared<AffineModel>(*this, 0.0, -1.0));
}

Distribution Distribution::p_tail(double p) const {
  detail::require_probability_open(p, "p_tail");
  if (auto exact = model_->exact_p_tail(p)) return Distribution(std::move(exact));
  return Distribution(std::make_shared<PTailModel>(*this, p));
}

MarginClass classify(std::span<const DensityClass> classes) {
  bool dec = true;
  bool inc = true;
  for (DensityClass c : classes) {
    switch (c) {
      case DensityClass::decreasing: inc = false; break;
      case DensityClass::increasing: dec = false; break;
      case DensityClass::constant: break;
      case DensityClass::none: return MarginClass::mixed;
    }
  }
  if (dec) return MarginClass::all_decreasing;
  if (inc) return MarginClass::all_increasing;
  return MarginClass::mixed;
}

MarginVector::MarginVector(std::vector<Distribution> margins) : margins_(std::move(margins)) {
  if (margins_.size() < 2) throw std::invalid_argument("MarginVector: need at least two margins");
}

MarginClass MarginVector::density_class() const {
  std::vector<DensityClass> classes;
  for (const auto& m : margins_) classes.push_back(m.density_class());
  return classify(classes);
}

MarginClass MarginVector::tail_density_class(double p) const {
  std::vector<DensityClass> classes;
  for (const auto& m : margins_) classes.push_back(m.model().density_class_on(p, 1.0));
  return classify(classes);
}

Distribution comonotonic_sum(const MarginVector& margins) {
  std::vector<WeightedComponent> parts;
  parts.reserve(margins.size());
  for (const auto& m : margins) parts.push_back({1.0, m});
  return make_quantile_sum(std::move(parts));
}

}  // namespace riskagg
