#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace riskagg {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Monotonicity of a density restricted to a quantile range.
///
/// `constant` covers uniform pieces and degenerate (point-mass) margins; it is
/// compatible with both monotone classes. `none` means no density exists
/// (atoms) or the density is not monotone on the range.
enum class DensityClass { decreasing, increasing, constant, none };

/// Combines the classes of two pieces that must share one monotone class.
DensityClass meet(DensityClass a, DensityClass b);

/// Class of the density of -X given the class of the density of X.
DensityClass flip(DensityClass c);

const char* to_string(DensityClass c);

struct Support {
  double lower;
  double upper;
};

struct ParetoForm {
  double alpha;
  double theta;
};

enum class Family {
  pareto,
  uniform,
  gamma,
  weibull,
  lognormal,
  binomial,
  bernoulli,
  point_mass,
  exponential,
  power_function,
};

const char* to_string(Family f);

/// Model behind a Distribution handle. Implementations are immutable.
///
/// Quantile-space arguments `u` are closed-interval probabilities in [0, 1]:
/// quantile(0) is the lower end of the support and quantile(1) the upper end
/// (possibly +inf). Public entry points on Distribution check open intervals.
class DistributionModel {
 public:
  virtual ~DistributionModel() = default;

  virtual double cdf(double x) const = 0;
  /// P(X < x).
  virtual double cdf_left(double x) const { return cdf(x); }
  virtual double survival(double x) const { return 1.0 - cdf(x); }

  /// inf{x : F(x) >= u}
  virtual double quantile(double u) const = 0;
  /// inf{x : F(x) > u}
  virtual double upper_quantile(double u) const { return quantile(u); }

  /// Integral of the quantile function over [a, b]; may be +inf.
  virtual double quantile_integral(double a, double b) const = 0;

  /// Integral of the survival function over [x0, x1]; x1 may be +inf.
  virtual double integrated_survival(double x0, double x1) const;

  virtual double mean() const { return quantile_integral(0.0, 1.0); }
  virtual Support support() const = 0;

  /// Density class of the law restricted to the quantile range (a, b).
  virtual DensityClass density_class_on(double a, double b) const = 0;
  /// False when the law has at least one atom.
  virtual bool atomless() const { return true; }

  /// Closed-form p-tail within the same family, when one exists.
  virtual std::shared_ptr<const DistributionModel> exact_p_tail(double /*p*/) const {
    return nullptr;
  }

  virtual std::optional<Family> family() const { return std::nullopt; }
  virtual std::optional<ParetoForm> pareto_form() const { return std::nullopt; }
  virtual std::string describe() const = 0;
};

/// Immutable, cheaply copyable handle to a univariate distribution.
class Distribution {
 public:
  explicit Distribution(std::shared_ptr<const DistributionModel> model);

  static Distribution pareto(double alpha, double theta);
  static Distribution uniform(double a, double b);
  /// Gamma with shape k and scale s (mean k*s).
  static Distribution gamma(double shape, double scale);
  /// Weibull with cdf 1 - exp(-(x/scale)^shape).
  static Distribution weibull(double scale, double shape);
  static Distribution lognormal(double mu, double sigma);
  static Distribution binomial(int trials, double q);
  static Distribution bernoulli(double q);
  static Distribution point_mass(double x);
  static Distribution exponential(double rate);
  /// cdf x^c on [0, 1].
  static Distribution power_function(double c);

  double cdf(double x) const { return model_->cdf(x); }
  double survival(double x) const { return model_->survival(x); }

  /// Left quantile (VaR). Requires 0 < p < 1.
  double quantile(double p) const;
  /// Right quantile inf{x : F(x) > p}. Requires 0 < p < 1.
  double upper_quantile(double p) const;
  /// Integral of the quantile function over [a, b] with 0 <= a <= b <= 1.
  double quantile_integral(double a, double b) const;
  /// ES_p; +inf when the tail is not integrable. Requires 0 < p < 1.
  double expected_shortfall(double p) const;
  /// +inf when the mean does not exist as a finite number.
  double mean() const { return model_->mean(); }
  bool has_finite_mean() const;
  Support support() const { return model_->support(); }

  DensityClass density_class() const { return model_->density_class_on(0.0, 1.0); }
  /// Density class of the p-tail distribution.
  DensityClass tail_density_class(double p) const { return model_->density_class_on(p, 1.0); }

  /// T_x(F): location shift by x.
  Distribution shifted(double x) const;
  /// F^lambda: law of lambda * X, lambda >= 0.
  Distribution scaled(double lambda) const;
  /// Law of -X.
  Distribution negated() const;
  /// Law of quantile(U) with U uniform on [p, 1].
  Distribution p_tail(double p) const;

  std::optional<Family> family() const { return model_->family(); }
  std::optional<ParetoForm> pareto_form() const { return model_->pareto_form(); }
  std::string describe() const { return model_->describe(); }

  const DistributionModel& model() const { return *model_; }
  const std::shared_ptr<const DistributionModel>& model_ptr() const { return model_; }

 private:
  std::shared_ptr<const DistributionModel> model_;
};

enum class MarginClass { all_decreasing, all_increasing, mixed };

const char* to_string(MarginClass c);

/// Ordered tuple (F_1, ..., F_n) of marginal laws, n >= 2.
class MarginVector {
 public:
  explicit MarginVector(std::vector<Distribution> margins);

  std::size_t size() const { return margins_.size(); }
  const Distribution& operator[](std::size_t i) const { return margins_[i]; }
  auto begin() const { return margins_.begin(); }
  auto end() const { return margins_.end(); }
  const std::vector<Distribution>& margins() const { return margins_; }

  MarginClass density_class() const;
  /// Shared monotone class of the p-tail distributions, if any.
  MarginClass tail_density_class(double p) const;

 private:
  std::vector<Distribution> margins_;
};

MarginClass classify(std::span<const DensityClass> classes);

/// F_1 (+) ... (+) F_n: the law whose quantile is the sum of the margins' quantiles.
Distribution comonotonic_sum(const MarginVector& margins);

namespace detail {
void require_probability_open(double p, const char* what);
void require_probability_closed(double p, const char* what);
}  // namespace detail

}  // namespace riskagg
