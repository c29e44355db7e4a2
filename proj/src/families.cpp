#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "riskagg/distributions.hpp"

namespace riskagg {
namespace {

std::string fmt_params(const char* name, std::initializer_list<double> params) {
  std::ostringstream os;
  os.precision(12);
  os << name << '(';
  bool first = true;
  for (double v : params) {
    if (!first) os << ", ";
    os << v;
    first = false;
  }
  os << ')';
  return os.str();
}

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// (1-a)^c - (1-b)^c divided by c, for 0 <= a <= b <= 1, computed without
// cancellation. Returns +inf when c < 0 and b == 1.
double power_tail_difference(double a, double b, double c) {
  const double la = std::log1p(-a);
  const double lb = std::log1p(-b);
  if (c == 0.0) return la - lb;
  return -std::exp(c * la) * std::expm1(c * (lb - la)) / c;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }
double normal_quantile(double u) {
  if (u <= 0.0) return -kInfinity;
  if (u >= 1.0) return kInfinity;
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

// ---------------------------------------------------------------- Pareto
class ParetoModel final : public DistributionModel {
 public:
  ParetoModel(double alpha, double theta) : alpha_(alpha), theta_(theta) {
    require(alpha > 0.0 && std::isfinite(alpha), "pareto: alpha must be positive");
    require(theta > 0.0 && std::isfinite(theta), "pareto: theta must be positive");
  }

  double cdf(double x) const override {
    return x < theta_ ? 0.0 : -std::expm1(alpha_ * std::log(theta_ / x));
  }
  double survival(double x) const override {
    return x < theta_ ? 1.0 : std::pow(theta_ / x, alpha_);
  }
  double quantile(double u) const override {
    if (u >= 1.0) return kInfinity;
    return theta_ * std::pow(1.0 - u, -1.0 / alpha_);
  }
  double quantile_integral(double a, double b) const override {
    if (b <= a) return 0.0;
    return theta_ * power_tail_difference(a, b, 1.0 - 1.0 / alpha_);
  }
  double integrated_survival(double x0, double x1) const override {
    if (x1 <= x0) return 0.0;
    double total = 0.0;
    if (x0 < theta_) {
      total += std::min(x1, theta_) - x0;
      x0 = theta_;
      if (x1 <= x0) return total;
    }
    // theta * int_{t0}^{t1} t^-alpha dt with t = x / theta
    const double t0 = x0 / theta_;
    const double t1 = x1 / theta_;
    const double c = 1.0 - alpha_;
    const double log_ratio = std::log(t1) - std::log(t0);
    if (c == 0.0) return total + theta_ * log_ratio;
    return total + theta_ * std::pow(t0, c) * std::expm1(c * log_ratio) / c;
  }
  double mean() const override {
    return alpha_ > 1.0 ? alpha_ * theta_ / (alpha_ - 1.0) : kInfinity;
  }
  Support support() const override { return {theta_, kInfinity}; }
  DensityClass density_class_on(double, double) const override { return DensityClass::decreasing; }
  std::shared_ptr<const DistributionModel> exact_p_tail(double p) const override {
    return std::make_shared<ParetoModel>(alpha_, theta_ * std::pow(1.0 - p, -1.0 / alpha_));
  }
  std::optional<Family> family() const override { return Family::pareto; }
  std::optional<ParetoForm> pareto_form() const override { return ParetoForm{alpha_, theta_}; }
  std::string describe() const override { return fmt_params("Pareto", {alpha_, theta_}); }

 private:
  double alpha_;
  double theta_;
};

// ---------------------------------------------------------------- Uniform
class UniformModel final : public DistributionModel {
 public:
  UniformModel(double a, double b) : a_(a), b_(b) {
    require(std::isfinite(a) && std::isfinite(b) && b > a, "uniform: need finite a < b");
  }

  double cdf(double x) const override { return std::clamp((x - a_) / (b_ - a_), 0.0, 1.0); }
  double survival(double x) const override { return std::clamp((b_ - x) / (b_ - a_), 0.0, 1.0); }
  double quantile(double u) const override { return a_ + (b_ - a_) * u; }
  double quantile_integral(double u, double v) const override {
    if (v <= u) return 0.0;
    return (v - u) * (a_ + 0.5 * (b_ - a_) * (u + v));
  }
  double mean() const override { return 0.5 * (a_ + b_); }
  Support support() const override { return {a_, b_}; }
  DensityClass density_class_on(double, double) const override { return DensityClass::constant; }
  std::shared_ptr<const DistributionModel> exact_p_tail(double p) const override {
    return std::make_shared<UniformModel>(quantile(p), b_);
  }
  std::optional<Family> family() const override { return Family::uniform; }
  std::string describe() const override { return fmt_params("Uniform", {a_, b_}); }

 private:
  double a_;
  double b_;
};

// ---------------------------------------------------------------- Gamma
class GammaModel final : public DistributionModel {
 public:
  GammaModel(double shape, double scale) : k_(shape), s_(scale) {
    require(shape > 0.0 && std::isfinite(shape), "gamma: shape must be positive");
    require(scale > 0.0 && std::isfinite(scale), "gamma: scale must be positive");
  }

  double cdf(double x) const override {
    return x <= 0.0 ? 0.0 : boost::math::gamma_p(k_, x / s_);
  }
  double survival(double x) const override {
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(k_, x / s_);
  }
  double quantile(double u) const override {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return kInfinity;
    if (u > 0.5) return s_ * boost::math::gamma_q_inv(k_, 1.0 - u);
    return s_ * boost::math::gamma_p_inv(k_, u);
  }
  double quantile_integral(double a, double b) const override {
    if (b <= a) return 0.0;
    const double xa = quantile(a) / s_;
    const double xb = quantile(b) / s_;
    if (a >= 0.5) {
      const double qb = std::isinf(xb) ? 0.0 : boost::math::gamma_q(k_ + 1.0, xb);
      return k_ * s_ * (boost::math::gamma_q(k_ + 1.0, xa) - qb);
    }
    const double pb = std::isinf(xb) ? 1.0 : boost::math::gamma_p(k_ + 1.0, xb);
    const double pa = xa <= 0.0 ? 0.0 : boost::math::gamma_p(k_ + 1.0, xa);
    return k_ * s_ * (pb - pa);
  }
  double integrated_survival(double x0, double x1) const override {
    if (x1 <= x0) return 0.0;
    double total = 0.0;
    if (x0 < 0.0) {
      total += std::min(x1, 0.0) - x0;
      x0 = 0.0;
      if (x1 <= x0) return total;
    }
    return total + stop_loss(x0) - stop_loss(x1);
  }
  double mean() const override { return k_ * s_; }
  Support support() const override { return {0.0, kInfinity}; }
  DensityClass density_class_on(double a, double b) const override {
    if (k_ <= 1.0) return DensityClass::decreasing;
    const double mode = (k_ - 1.0) * s_;
    if (quantile(a) >= mode) return DensityClass::decreasing;
    if (quantile(b) <= mode) return DensityClass::increasing;
    return DensityClass::none;
  }
  std::optional<Family> family() const override { return Family::gamma; }
  std::string describe() const override { return fmt_params("Gamma", {k_, s_}); }

 private:
  // E[(X - t)+] for t >= 0
  double stop_loss(double t) const {
    if (std::isinf(t)) return 0.0;
    const double z = t / s_;
    return k_ * s_ * boost::math::gamma_q(k_ + 1.0, z) - t * boost::math::gamma_q(k_, z);
  }

  double k_;
  double s_;
};

// ---------------------------------------------------------------- Weibull
class WeibullModel final : public DistributionModel {
 public:
  WeibullModel(double scale, double shape) : lambda_(scale), k_(shape) {
    require(scale > 0.0 && std::isfinite(scale), "weibull: scale must be positive");
    require(shape > 0.0 && std::isfinite(shape), "weibull: shape must be positive");
  }

  double cdf(double x) const override {
    return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / lambda_, k_));
  }
  double survival(double x) const override {
    return x <= 0.0 ? 1.0 : std::exp(-std::pow(x / lambda_, k_));
  }
  double quantile(double u) const override {
    if (u >= 1.0) return kInfinity;
    return lambda_ * std::pow(-std::log1p(-u), 1.0 / k_);
  }
  double quantile_integral(double a, double b) const override {
    if (b <= a) return 0.0;
    // E[X; X <= q(u)] = lambda * Gamma(1 + 1/k) * P(1 + 1/k, -log(1-u))
    const double m = 1.0 + 1.0 / k_;
    const double ta = -std::log1p(-a);
    const double tb = -std::log1p(-b);
    const double scale = lambda_ * std::tgamma(m);
    if (a >= 0.5) {
      const double qb = std::isinf(tb) ? 0.0 : boost::math::gamma_q(m, tb);
      return scale * (boost::math::gamma_q(m, ta) - qb);
    }
    const double pb = std::isinf(tb) ? 1.0 : boost::math::gamma_p(m, tb);
    const double pa = ta <= 0.0 ? 0.0 : boost::math::gamma_p(m, ta);
    return scale * (pb - pa);
  }
  double integrated_survival(double x0, double x1) const override {
    if (x1 <= x0) return 0.0;
    double total = 0.0;
    if (x0 < 0.0) {
      total += std::min(x1, 0.0) - x0;
      x0 = 0.0;
      if (x1 <= x0) return total;
    }
    return total + stop_loss(x0) - stop_loss(x1);
  }
  double mean() const override { return lambda_ * std::tgamma(1.0 + 1.0 / k_); }
  Support support() const override { return {0.0, kInfinity}; }
  DensityClass density_class_on(double a, double b) const override {
    if (k_ <= 1.0) return DensityClass::decreasing;
    const double mode = lambda_ * std::pow((k_ - 1.0) / k_, 1.0 / k_);
    if (quantile(a) >= mode) return DensityClass::decreasing;
    if (quantile(b) <= mode) return DensityClass::increasing;
    return DensityClass::none;
  }
  std::optional<Family> family() const override { return Family::weibull; }
  std::string describe() const override { return fmt_params("Weibull", {lambda_, k_}); }

 private:
  double stop_loss(double t) const {
    if (std::isinf(t)) return 0.0;
    const double m = 1.0 + 1.0 / k_;
    const double z = std::pow(t / lambda_, k_);
    return lambda_ * std::tgamma(m) * boost::math::gamma_q(m, z) - t * std::exp(-z);
  }

  double lambda_;
  double k_;
};

// ---------------------------------------------------------------- LogNormal
class LogNormalModel final : public DistributionModel {
 public:
  LogNormalModel(double mu, double sigma) : mu_(mu), sigma_(sigma) {
    require(std::isfinite(mu), "lognormal: mu must be finite");
    require(sigma > 0.0 && std::isfinite(sigma), "lognormal: sigma must be positive");
  }

  double cdf(double x) const override {
    return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - mu_) / sigma_);
  }
  double survival(double x) const override {
    return x <= 0.0 ? 1.0 : normal_sf((std::log(x) - mu_) / sigma_);
  }
  double quantile(double u) const override {
    if (u <= 0.0) return 0.0;
    return std::exp(mu_ + sigma_ * normal_quantile(u));
  }
  double quantile_integral(double a, double b) const override {
    if (b <= a) return 0.0;
    const double scale = std::exp(mu_ + 0.5 * sigma_ * sigma_);
    const double za = normal_quantile(a) - sigma_;
    const double zb = normal_quantile(b) - sigma_;
    if (a >= 0.5) return scale * (normal_sf(za) - normal_sf(zb));
    return scale * (normal_cdf(zb) - normal_cdf(za));
  }
  double integrated_survival(double x0, double x1) const override {
    if (x1 <= x0) return 0.0;
    double total = 0.0;
    if (x0 < 0.0) {
      total += std::min(x1, 0.0) - x0;
      x0 = 0.0;
      if (x1 <= x0) return total;
    }
    return total + stop_loss(x0) - stop_loss(x1);
  }
  double mean() const override { return std::exp(mu_ + 0.5 * sigma_ * sigma_); }
  Support support() const override { return {0.0, kInfinity}; }
  DensityClass density_class_on(double a, double b) const override {
    const double mode = std::exp(mu_ - sigma_ * sigma_);
    if (quantile(a) >= mode) return DensityClass::decreasing;
    if (quantile(b) <= mode) return DensityClass::increasing;
    return DensityClass::none;
  }
  std::optional<Family> family() const override { return Family::lognormal; }
  std::string describe() const override { return fmt_params("LogNormal", {mu_, sigma_}); }

 private:
  double stop_loss(double t) const {
    if (std::isinf(t)) return 0.0;
    if (t <= 0.0) return mean() - t;
    const double d = (std::log(t) - mu_) / sigma_;
    return mean() * normal_sf(d - sigma_) - t * normal_sf(d);
  }

  double mu_;
  double sigma_;
};

// ---------------------------------------------------------------- Exponential
class ExponentialModel final : public DistributionModel {
 public:
  explicit ExponentialModel(double rate) : rate_(rate) {
    require(rate > 0.0 && std::isfinite(rate), "exponential: rate must be positive");
  }

  double cdf(double x) const override { return x <= 0.0 ? 0.0 : -std::expm1(-rate_ * x); }
  double survival(double x) const override { return x <= 0.0 ? 1.0 : std::exp(-rate_ * x); }
  double quantile(double u) const override {
    if (u >= 1.0) return kInfinity;
    return -std::log1p(-u) / rate_;
  }
  double quantile_integral(double a, double b) const override {
    if (b <= a) return 0.0;
    // antiderivative of -log(1-u) is (1-u) log(1-u) + u
    auto xlogx = [](double t) { return t <= 0.0 ? 0.0 : t * std::log(t); };
    return ((b - a) + xlogx(1.0 - b) - xlogx(1.0 - a)) / rate_;
  }
  double integrated_survival(double x0, double x1) const override {
    if (x1 <= x0) return 0.0;
    double total = 0.0;
    if (x0 < 0.0) {
      total += std::min(x1, 0.0) - x0;
      x0 = 0.0;
      if (x1 <= x0) return total;
    }
    const double e1 = std::isinf(x1) ? 0.0 : std::exp(-rate_ * x1);
    return total + (std::exp(-rate_ * x0) - e1) / rate_;
  }
  double mean() const override { return 1.0 / rate_; }
  Support support() const override { return {0.0, kInfinity}; }
  DensityClass density_class_on(double, double) const override { return DensityClass::decreasing; }
  std::optional<Family> family() const override { return Family::exponential; }
  std::string describe() const override { return fmt_params("Exponential", {rate_}); }

 private:
  double rate_;
};

// ---------------------------------------------------------------- PowerFunction
class PowerFunctionModel final : public DistributionModel {
 public:
  explicit PowerFunctionModel(double c) : c_(c) {
    require(c > 0.0 && std::isfinite(c), "power_function: exponent must be positive");
  }

  double cdf(double x) const override {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return std::pow(x, c_);
  }
  double quantile(double u) const override { return std::pow(u, 1.0 / c_); }
  double quantile_integral(double a, double b) const override {
    if (b <= a) return 0.0;
    const double e = 1.0 + 1.0 / c_;
    return (std::pow(b, e) - std::pow(a, e)) / e;
  }
  double mean() const override { return c_ / (c_ + 1.0); }
  Support support() const override { return {0.0, 1.0}; }
  DensityClass density_class_on(double, double) const override {
    if (c_ < 1.0) return DensityClass::decreasing;
    if (c_ > 1.0) return DensityClass::increasing;
    return DensityClass::constant;
  }
  std::optional<Family> family() const override { return Family::power_function; }
  std::string describe() const override { return fmt_params("PowerFunction", {c_}); }

 private:
  double c_;
};

// ---------------------------------------------------------------- PointMass
class PointMassModel final : public DistributionModel {
 public:
  explicit PointMassModel(double x) : x_(x) {
    require(std::isfinite(x), "point_mass: location must be finite");
  }

  double cdf(double x) const override { return x >= x_ ? 1.0 : 0.0; }
  double cdf_left(double x) const override { return x > x_ ? 1.0 : 0.0; }
  double quantile(double) const override { return x_; }
  double upper_quantile(double) const override { return x_; }
  double quantile_integral(double a, double b) const override {
    return b <= a ? 0.0 : x_ * (b - a);
  }
  double integrated_survival(double x0, double x1) const override {
    return std::max(0.0, std::min(x1, x_) - x0);
  }
  double mean() const override { return x_; }
  Support support() const override { return {x_, x_}; }
  // Degenerate margins act as location shifts; they fit either monotone class.
  DensityClass density_class_on(double, double) const override { return DensityClass::constant; }
  bool atomless() const override { return false; }
  std::shared_ptr<const DistributionModel> exact_p_tail(double) const override {
    return std::make_shared<PointMassModel>(x_);
  }
  std::optional<Family> family() const override { return Family::point_mass; }
  std::string describe() const override { return fmt_params("PointMass", {x_}); }

 private:
  double x_;
};

// ---------------------------------------------------------------- Binomial / Bernoulli
class BinomialModel final : public DistributionModel {
 public:
  BinomialModel(int trials, double q, Family tag) : m_(trials), q_(q), tag_(tag) {
    require(trials >= 1, "binomial: trials must be positive");
    require(q >= 0.0 && q <= 1.0, "binomial: q must lie in [0, 1]");
    std::vector<double> pmf(static_cast<std::size_t>(m_) + 1, 0.0);
    if (q_ == 0.0) {
      pmf.front() = 1.0;
    } else if (q_ == 1.0) {
      pmf.back() = 1.0;
    } else {
      const double lq = std::log(q_);
      const double lr = std::log1p(-q_);
      for (int k = 0; k <= m_; ++k) {
        const double lc = std::lgamma(m_ + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m_ - k + 1.0);
        pmf[k] = std::exp(lc + k * lq + (m_ - k) * lr);
      }
    }
    cdf_.resize(pmf.size());
    sf_.resize(pmf.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
      acc += pmf[k];
      cdf_[k] = std::min(acc, 1.0);
    }
    cdf_.back() = 1.0;
    acc = 0.0;
    for (std::size_t k = pmf.size(); k-- > 0;) {
      sf_[k] = acc;  // P(X > k)
      acc += pmf[k];
    }
    lower_ = 0;
    while (pmf[lower_] == 0.0) ++lower_;
    upper_ = m_;
    while (pmf[upper_] == 0.0) --upper_;
  }

  double cdf(double x) const override {
    if (x < 0.0) return 0.0;
    if (x >= m_) return 1.0;
    return cdf_[static_cast<std::size_t>(std::floor(x))];
  }
  double cdf_left(double x) const override {
    if (x <= 0.0) return 0.0;
    if (x > m_) return 1.0;
    return cdf_[static_cast<std::size_t>(std::ceil(x)) - 1];
  }
  double survival(double x) const override {
    if (x < 0.0) return 1.0;
    if (x >= m_) return 0.0;
    return sf_[static_cast<std::size_t>(std::floor(x))];
  }
  double quantile(double u) const override {
    if (u <= 0.0) return lower_;
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<double>(std::min<std::ptrdiff_t>(it - cdf_.begin(), upper_));
  }
  double upper_quantile(double u) const override {
    if (u >= 1.0) return upper_;
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<double>(std::min<std::ptrdiff_t>(it - cdf_.begin(), upper_));
  }
  double quantile_integral(double a, double b) const override {
    if (b <= a) return 0.0;
    // value k on the plateau (F(k-1), F(k)]
    double total = 0.0;
    double prev = 0.0;
    for (int k = 0; k <= m_; ++k) {
      const double lo = std::max(a, prev);
      const double hi = std::min(b, cdf_[k]);
      if (hi > lo) total += k * (hi - lo);
      prev = cdf_[k];
      if (prev >= b) break;
    }
    return total;
  }
  double mean() const override { return m_ * q_; }
  Support support() const override { return {double(lower_), double(upper_)}; }
  DensityClass density_class_on(double, double) const override {
    return lower_ == upper_ ? DensityClass::constant : DensityClass::none;
  }
  bool atomless() const override { return false; }
  std::optional<Family> family() const override { return tag_; }
  std::string describe() const override {
    if (tag_ == Family::bernoulli) return fmt_params("Bernoulli", {q_});
    return fmt_params("Binomial", {double(m_), q_});
  }

 private:
  int m_;
  double q_;
  Family tag_;
  std::vector<double> cdf_;
  std::vector<double> sf_;
  int lower_ = 0;
  int upper_ = 0;
};

}  // namespace

Distribution Distribution::pareto(double alpha, double theta) {
  return Distribution(std::make_shared<ParetoModel>(alpha, theta));
}
Distribution Distribution::uniform(double a, double b) {
  return Distribution(std::make_shared<UniformModel>(a, b));
}
Distribution Distribution::gamma(double shape, double scale) {
  return Distribution(std::make_shared<GammaModel>(shape, scale));
}
Distribution Distribution::weibull(double scale, double shape) {
  return Distribution(std::make_shared<WeibullModel>(scale, shape));
}
Distribution Distribution::lognormal(double mu, double sigma) {
  return Distribution(std::make_shared<LogNormalModel>(mu, sigma));
}
Distribution Distribution::binomial(int trials, double q) {
  return Distribution(std::make_shared<BinomialModel>(trials, q, Family::binomial));
}
Distribution Distribution::bernoulli(double q) {
  return Distribution(std::make_shared<BinomialModel>(1, q, Family::bernoulli));
}
Distribution Distribution::point_mass(double x) {
  return Distribution(std::make_shared<PointMassModel>(x));
}
Distribution Distribution::exponential(double rate) {
  return Distribution(std::make_shared<ExponentialModel>(rate));
}
Distribution Distribution::power_function(double c) {
  return Distribution(std::make_shared<PowerFunctionModel>(c));
}

}  // namespace riskagg
