#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "riskagg/applications.hpp"
#include "riskagg/orders.hpp"

using namespace riskagg;
using doctest::Approx;

namespace {

std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(n);
  for (double& v : w) v = e(rng);
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= s;
  return w;
}

std::vector<double> equal(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

}  // namespace

TEST_CASE("p-merging anchors") {
  for (double r : {-2.0, -1.0, 0.0, 1.0, 2.0}) CHECK(p_merge_constant(r, std::vector<double>{1.0}).value == 1.0);

  // two p-values: every r <= 1 needs the factor 2
  for (double r : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0}) {
    const auto res = p_merge_constant(r, equal(2));
    CAPTURE(r);
    CHECK(res.value == Approx(2.0).epsilon(1e-6));
    CHECK_FALSE(res.flagged);
  }
  // r >= n - 1 gives n^{1/r}
  CHECK(p_merge_constant(2.0, equal(2)).value == Approx(std::sqrt(2.0)).epsilon(1e-6));
  CHECK(p_merge_constant(2.0, equal(3)).value == Approx(std::sqrt(3.0)).epsilon(1e-6));
  CHECK(p_merge_constant(1.0, equal(5)).value == Approx(2.0).epsilon(1e-6));

  const auto h = p_merge_constant(-1.0, equal(2));
  CHECK(std::abs(h.value - h.cross_check) < 1e-4 * h.value);

  CHECK_THROWS_AS(p_merge_constant(1.0, std::vector<double>{0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS(p_merge_constant(std::nan(""), equal(2)));
}

TEST_CASE("p-merging margins") {
  const std::vector<double> w{0.25, 0.75, 0.0};
  const auto neg = p_merge_margins(-2.0, w);
  REQUIRE(neg.size() == 3);
  REQUIRE(neg[1].pareto_form());
  CHECK(neg[1].pareto_form()->alpha == Approx(0.5).epsilon(1e-15));
  CHECK(neg[1].pareto_form()->theta == Approx(0.75).epsilon(1e-15));
  CHECK(neg[2].quantile(0.5) == 0.0);
  const auto zero = p_merge_margins(0.0, w);
  CHECK(zero[0].quantile(0.5) == Approx(0.25 * std::log(2.0)).epsilon(1e-14));
  // -w U^r for r > 0
  const auto pos = p_merge_margins(2.0, w);
  CHECK(pos[1].quantile(0.75) == Approx(-0.75 * 0.25 * 0.25).epsilon(1e-12));
}

TEST_CASE("weighted merging never needs more than the symmetric constant") {
  std::mt19937_64 rng(77);
  for (double r : {-2.0, -1.0, 0.5, 2.0}) {
    for (std::size_t n : {2u, 3u}) {
      const double sym = p_merge_constant(r, equal(n)).value;
      for (int trial = 0; trial < 2; ++trial) {
        const auto w = random_simplex(n, rng);
        CAPTURE(r);
        CAPTURE(n);
        CHECK(p_merge_constant(r, w).value <= sym * (1.0 + 1e-4));
      }
    }
  }
}

TEST_CASE("symmetric constants grow with n for negative r") {
  for (double r : {-2.0, -1.0, -0.5}) {
    double prev = 1.0;
    for (std::size_t n : {2u, 3u, 4u}) {
      const double a = p_merge_constant(r, equal(n)).value;
      CAPTURE(r);
      CAPTURE(n);
      CHECK(a >= prev * (1.0 - 1e-6));
      prev = a;
    }
  }
}

TEST_CASE("portfolio diversification") {
  const auto F = Distribution::pareto(3.0, 1.0);
  const double p = 0.95;
  const std::vector<double> flat = equal(3);
  const std::vector<double> lam{0.6, 0.3, 0.1};

  const auto es_flat = portfolio_worst_case(p, F, flat, RiskMeasure::es);
  const auto es_lam = portfolio_worst_case(p, F, lam, RiskMeasure::es);
  CHECK(es_flat.value == Approx(es_lam.value).epsilon(1e-13));
  CHECK(es_flat.value == Approx(F.expected_shortfall(p)).epsilon(1e-13));
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto gam = oracle::sinkhorn(3, rng).apply(lam);
    CHECK(portfolio_worst_case(p, F, gam, RiskMeasure::es).value == Approx(es_lam.value).epsilon(1e-13));
  }

  REQUIRE(majorizes(lam, flat));
  const double v_flat = portfolio_worst_case(p, F, flat, RiskMeasure::var).value;
  const double v_lam = portfolio_worst_case(p, F, lam, RiskMeasure::var).value;
  CHECK(v_flat >= v_lam * (1.0 - 1e-6));
  for (int trial = 0; trial < 3; ++trial) {
    const auto gam = oracle::sinkhorn(3, rng).apply(lam);
    CHECK(portfolio_worst_case(p, F, gam, RiskMeasure::var).value >= v_lam * (1.0 - 1e-6));
  }

  const auto single = portfolio_worst_case(p, F, std::vector<double>{1.0, 0.0, 0.0}, RiskMeasure::var);
  CHECK(single.value == Approx(F.quantile(p)).epsilon(1e-6));
}

TEST_CASE("Bernoulli joint mixability anchors") {
  const auto c = bernoulli_jm(std::vector<double>{0.2, 0.3, 0.5});
  CHECK(c.feasible);
  REQUIRE(c.center);
  CHECK(*c.center == Approx(1.0).epsilon(1e-15));
  REQUIRE(c.construction.size() == 3);
  CHECK(c.construction[0].start == Approx(0.0).scale(1.0));
  CHECK(c.construction[1].start == Approx(0.2).epsilon(1e-15));
  CHECK(c.construction[2].start == Approx(0.5).epsilon(1e-15));
  CHECK(c.construction[2].length == Approx(0.5).epsilon(1e-15));

  const auto anti = bernoulli_jm(std::vector<double>{0.5, 0.5});
  CHECK(anti.feasible);
  CHECK(*anti.center == Approx(1.0).epsilon(1e-15));

  const auto no = bernoulli_jm(std::vector<double>{0.2, 0.3});
  CHECK_FALSE(no.feasible);
  CHECK_FALSE(no.center);
  CHECK(no.construction.empty());

  CHECK_THROWS(bernoulli_jm(std::vector<double>{0.2, 1.3}));
}

TEST_CASE("Bernoulli arc construction covers the circle evenly") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int feasible = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + trial % 6;
    std::vector<double> q(n);
    for (double& v : q) v = unif(rng);
    if (trial % 2 == 0) {
      // force an integer total by completing the last entry when possible
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) s += q[i];
      const double target = std::ceil(s);
      if (target - s <= 1.0) q[n - 1] = target - s;
    }
    const double total = std::accumulate(q.begin(), q.end(), 0.0);
    const bool rule = std::abs(total - std::round(total)) <= 1e-12;
    const auto cert = bernoulli_jm(q);
    CHECK(cert.feasible == rule);
    if (!cert.feasible) continue;
    ++feasible;
    const int k = static_cast<int>(std::round(total));
    std::vector<double> ends{0.0, 1.0};
    for (const auto& a : cert.construction) {
      ends.push_back(a.start);
      ends.push_back(std::fmod(a.start + a.length, 1.0));
    }
    std::sort(ends.begin(), ends.end());
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
      if (ends[i + 1] - ends[i] < 1e-9) continue;
      const int cover = cert.coverage(0.5 * (ends[i] + ends[i + 1]));
      CHECK(cover == k);
      mass += cover * (ends[i + 1] - ends[i]);
    }
    CHECK(mass == Approx(total).epsilon(1e-9));
  }
  CHECK(feasible > 300);
}

TEST_CASE("mean-length condition") {
  CHECK(mean_length_jm_check(MarginVector({Distribution::uniform(0, 1), Distribution::uniform(0, 1)})));
  CHECK_FALSE(mean_length_jm_check(MarginVector({Distribution::uniform(0, 1), Distribution::uniform(0, 10)})));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> len(0.1, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 5;
    std::vector<Distribution> m;
    double total = 0.0;
    double longest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = len(rng);
      total += a;
      longest = std::max(longest, a);
      m.push_back(Distribution::uniform(0.0, a));
    }
    CHECK(mean_length_jm_check(MarginVector(m)) == (total >= 2.0 * longest));
  }
  // shifted supports count lengths from the lower end
  CHECK(mean_length_jm_check(MarginVector({Distribution::uniform(3, 4), Distribution::uniform(-1, 0)})));
  CHECK_THROWS_AS(mean_length_jm_check(MarginVector({Distribution::pareto(3, 1), Distribution::uniform(0, 1)})),
                  std::invalid_argument);
  CHECK_THROWS_AS(mean_length_jm_check(MarginVector({Distribution::power_function(2.0), Distribution::uniform(0, 1)})),
                  std::invalid_argument);
}
