#pragma once

#include <memory>
#include <vector>

#include "riskagg/distributions.hpp"

namespace riskagg {

struct WeightedComponent {
  double weight;
  Distribution component;
};

/// Mixture of cdfs: F = sum_j w_j F_j with weights on the simplex.
///
/// Quantiles are found by bisection on the mixed cdf inside the bracket
/// [min_j q_j(u), max_j q_j(u)] to relative tolerance 1e-12. Quantile
/// integrals use the identity
///   int_a^b q(u) du = (1-a) q(a) - (1-b) q(b) + int_{q(a)}^{q(b)} S(x) dx
/// so only the components' integrated survival functions are needed.
class MixtureModel final : public DistributionModel {
 public:
  explicit MixtureModel(std::vector<WeightedComponent> components);

  double cdf(double x) const override;
  double cdf_left(double x) const override;
  double survival(double x) const override;
  double quantile(double u) const override;
  double upper_quantile(double u) const override;
  double quantile_integral(double a, double b) const override;
  double integrated_survival(double x0, double x1) const override;
  double mean() const override;
  Support support() const override;
  DensityClass density_class_on(double a, double b) const override;
  bool atomless() const override;
  std::string describe() const override;

  const std::vector<WeightedComponent>& components() const { return components_; }

 private:
  std::vector<WeightedComponent> components_;
};

/// Quantile combination: q(u) = sum_j w_j q_j(u), w_j >= 0.
///
/// With weights on the simplex this is a quantile mixture; with unit weights
/// it is the comonotonic sum.
class QuantileSumModel final : public DistributionModel {
 public:
  explicit QuantileSumModel(std::vector<WeightedComponent> components);

  double cdf(double x) const override;
  double cdf_left(double x) const override;
  double quantile(double u) const override;
  double upper_quantile(double u) const override;
  double quantile_integral(double a, double b) const override;
  double mean() const override;
  Support support() const override;
  DensityClass density_class_on(double a, double b) const override;
  bool atomless() const override;
  std::optional<ParetoForm> pareto_form() const override;
  std::string describe() const override;

  const std::vector<WeightedComponent>& components() const { return components_; }

 private:
  std::vector<WeightedComponent> components_;
};

/// Law of shift + scale * X. A negative scale reflects the law.
class AffineModel final : public DistributionModel {
 public:
  AffineModel(Distribution base, double shift, double scale);

  double cdf(double x) const override;
  double cdf_left(double x) const override;
  double survival(double x) const override;
  double quantile(double u) const override;
  double upper_quantile(double u) const override;
  double quantile_integral(double a, double b) const override;
  double mean() const override;
  Support support() const override;
  DensityClass density_class_on(double a, double b) const override;
  bool atomless() const override { return base_.model().atomless(); }
  std::optional<Family> family() const override { return base_.family(); }
  std::optional<ParetoForm> pareto_form() const override;
  std::string describe() const override;

  const Distribution& base() const { return base_; }
  double shift() const { return shift_; }
  double scale() const { return scale_; }

 private:
  Distribution base_;
  double shift_;
  double scale_;
};

/// Law of q(U) with U uniform on [p, 1].
class PTailModel final : public DistributionModel {
 public:
  PTailModel(Distribution base, double p);

  double cdf(double x) const override;
  double cdf_left(double x) const override;
  double survival(double x) const override;
  double quantile(double u) const override;
  double upper_quantile(double u) const override;
  double quantile_integral(double a, double b) const override;
  Support support() const override;
  DensityClass density_class_on(double a, double b) const override;
  bool atomless() const override { return base_.model().atomless(); }
  std::optional<ParetoForm> pareto_form() const override;
  std::string describe() const override;

 private:
  double lift(double u) const { return p_ + (1.0 - p_) * u; }

  Distribution base_;
  double p_;
};

/// Drops zero-weight components; a single survivor is returned unchanged.
Distribution make_mixture(std::vector<WeightedComponent> components);
Distribution make_quantile_sum(std::vector<WeightedComponent> components);

}  // namespace riskagg
