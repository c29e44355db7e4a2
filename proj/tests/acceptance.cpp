// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//   acceptance --cli PATH --configs DIR --workdir DIR

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "riskagg/applications.hpp"
#include "riskagg/bounds.hpp"
#include "riskagg/config.hpp"
#include "riskagg/experiment.hpp"
#include "riskagg/mixtures.hpp"
#include "riskagg/rearrangement.hpp"

using namespace riskagg;

namespace {

struct Args {
  std::string cli;
  std::string configs;
  std::string workdir = ".";
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) {
    o.pass = false;
    o.detail += " [runtime limit " + std::to_string(limit_s) + " s exceeded]";
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %-44s %8.2fs  %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

MarginVector pareto_margins(double alpha, const std::vector<double>& theta) {
  std::vector<Distribution> m;
  for (double t : theta) m.push_back(Distribution::pareto(alpha, t));
  return MarginVector(m);
}

struct Sweep {
  std::string name;
  SweepOutput out;
  std::map<std::tuple<unsigned, MixtureKind, Engine>, const SweepRow*> index;

  const SweepRow* find(unsigned k, MixtureKind kind, Engine e) const {
    auto it = index.find({k, kind, e});
    return it == index.end() ? nullptr : it->second;
  }
  std::vector<unsigned> ks() const {
    std::vector<unsigned> k;
    for (const auto& r : out.rows) {
      if (k.empty() || k.back() != r.k) k.push_back(r.k);
    }
    return k;
  }
};

Sweep load_sweep(const Args& a, const std::string& name) {
  Sweep s;
  s.name = name;
  s.out = run_sweep(load_experiment(a.configs + "/" + name + ".json"));
  for (const auto& r : s.out.rows) s.index[{r.k, r.kind, r.engine}] = &r;
  return s;
}

// Consecutive pairs of the dual curve for one mixture kind; worst relative drop.
Outcome monotone_curve(const std::vector<Sweep>& sweeps, MixtureKind kind) {
  Outcome o{true, ""};
  for (const auto& s : sweeps) {
    double worst = kInfinity;
    const auto ks = s.ks();
    for (std::size_t i = 1; i < ks.size(); ++i) {
      const auto* a = s.find(ks[i - 1], kind, Engine::dual);
      const auto* b = s.find(ks[i], kind, Engine::dual);
      if (!a || !b || !a->error.empty() || !b->error.empty()) return {false, s.name + ": missing dual row"};
      const double slack = (b->value - a->value) / std::abs(a->value);
      worst = std::min(worst, slack);
      if (slack < -1e-6) o.pass = false;
    }
    o.detail += s.name + " min step " + num(worst) + "; ";
  }
  return o;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream f(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(f, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  Args args;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    if (key == "--cli") args.cli = argv[i + 1];
    else if (key == "--configs") args.configs = argv[i + 1];
    else if (key == "--workdir") args.workdir = argv[i + 1];
    else {
      std::fprintf(stderr, "unknown option %s\n", key.c_str());
      return 2;
    }
  }
  if (args.cli.empty() || args.configs.empty()) {
    std::fprintf(stderr, "usage: acceptance --cli PATH --configs DIR [--workdir DIR]\n");
    return 2;
  }

  report(1, "beta = 0 gives the sum of ES", 1.0, [] {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> family(0, 5);
    const std::size_t sizes[] = {2, 3, 5};
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = sizes[trial % 3];
      std::vector<Distribution> m;
      for (std::size_t i = 0; i < n; ++i) {
        switch (family(rng)) {
          case 0: m.push_back(Distribution::pareto(1.5 + 8.0 * u(rng), 0.5 + 3.0 * u(rng))); break;
          case 1: m.push_back(Distribution::exponential(0.2 + 2.0 * u(rng))); break;
          case 2: m.push_back(Distribution::gamma(0.5 + 5.0 * u(rng), 0.5 + 2.0 * u(rng))); break;
          case 3: m.push_back(Distribution::weibull(0.5 + 2.0 * u(rng), 0.5 + 4.0 * u(rng))); break;
          case 4: m.push_back(Distribution::lognormal(u(rng) - 0.5, 0.3 + u(rng))); break;
          default: m.push_back(Distribution::uniform(-u(rng), 1.0 + 3.0 * u(rng))); break;
        }
      }
      const double p = 0.5 + 0.49 * u(rng);
      const MarginVector F(m);
      const double d = dual_objective(p, F, BetaVector::zero(n));
      const double es = worst_case_es(p, F);
      worst = std::max(worst, rel(d, es));
    }
    return Outcome{worst <= 1e-9, "max scaled diff " + num(worst)};
  });

  report(2, "uniform complete-mix anchor 2.925", 30.0, [] {
    const MarginVector U({Distribution::uniform(0, 1), Distribution::uniform(0, 1), Distribution::uniform(0, 1)});
    const double d = worst_case_var(0.95, U).value;
    const double ra = ra_worst_case_var(0.95, U, 10000).value;
    return Outcome{std::abs(d - 2.925) <= 1e-6 && std::abs(ra - 2.925) <= 5e-3,
                   "dual " + num(d) + " ra " + num(ra)};
  });

  report(3, "Pareto sandwich", 60.0, [] {
    const std::vector<double> theta{1, 2, 3};
    double margin = kInfinity;
    bool ok = true;
    for (double alpha : {1.5, 3.0, 10.0}) {
      for (double p : {0.9, 0.95, 0.99}) {
        const auto [lo, hi] = pareto_var_bounds(p, alpha, theta);
        const double v = worst_case_var(p, pareto_margins(alpha, theta)).value;
        ok = ok && lo < v && v < hi;
        margin = std::min({margin, (v - lo) / v, (hi - v) / v});
      }
    }
    return Outcome{ok && margin > 0.0, "smallest relative margin " + num(margin)};
  });

  report(4, "homogeneity in theta", 0.0, [] {
    const std::vector<double> theta{1, 2, 3};
    const std::vector<double> theta5{5, 10, 15};
    double worst = 0.0;
    for (double alpha : {1.0 / 3.0, 1.5, 3.0}) {
      for (double p : {0.9, 0.95}) {
        const double a = worst_case_var(p, pareto_margins(alpha, theta)).value;
        const double b = worst_case_var(p, pareto_margins(alpha, theta5)).value;
        worst = std::max(worst, std::abs(b - 5.0 * a) / b);
      }
    }
    return Outcome{worst < 1e-5, "max relative diff " + num(worst)};
  });

  std::vector<Sweep> figures;
  const auto t0 = std::chrono::steady_clock::now();
  for (const char* name : {"figure1a", "figure2", "figure3"}) figures.push_back(load_sweep(args, name));
  const double sweep_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  report(5, "quantile-mixture curves nondecreasing", 0.0, [&] {
    auto o = monotone_curve(figures, MixtureKind::quantile);
    o.detail += "sweeps took " + num(sweep_secs) + " s";
    if (sweep_secs > 300.0) {
      o.pass = false;
      o.detail += " [runtime limit 300 s exceeded]";
    }
    return o;
  });

  report(6, "distribution-mixture curves nondecreasing", 0.0,
         [&] { return monotone_curve(figures, MixtureKind::distribution); });

  report(7, "mixing chain at alpha = 1/3", 0.0, [] {
    const double alpha = 1.0 / 3.0;
    const std::vector<double> theta{1, 2, 3};
    const MarginVector F = pareto_margins(alpha, theta);
    const auto L = DoublyStochasticMatrix::convex_identity_uniform(0.8, 3);
    const double base = worst_case_var(0.95, F).value;
    double worst = kInfinity;
    for (unsigned k = 0; k <= 10; ++k) {
      const auto Lk = matrix_power(L, k);
      const double mixed = worst_case_var(0.95, distribution_mixture(Lk, F)).value;
      const double pareto = worst_case_var(0.95, pareto_margins(alpha, Lk.apply(theta))).value;
      worst = std::min({worst, (mixed - base) / base, (pareto - mixed) / mixed});
    }
    return Outcome{worst >= -1e-6, "min relative slack " + num(worst)};
  });

  report(8, "figure 1(a): distribution >= quantile mixture", 0.0, [&] {
    const Sweep& s = figures[0];
    double worst = kInfinity;
    for (unsigned k : s.ks()) {
      if (k == 0) continue;
      const auto* q = s.find(k, MixtureKind::quantile, Engine::dual);
      const auto* d = s.find(k, MixtureKind::distribution, Engine::dual);
      if (!q || !d) return Outcome{false, "missing rows"};
      worst = std::min(worst, (d->value - q->value) / q->value);
    }
    return Outcome{worst >= -1e-6, "min relative excess " + num(worst)};
  });

  report(9, "ES invariant under quantile mixing", 0.0, [] {
    double worst = 0.0;
    const auto L = DoublyStochasticMatrix::convex_identity_uniform(0.8, 3);
    const std::vector<MarginVector> settings{
        pareto_margins(3.0, {1, 2, 3}), pareto_margins(1.5, {1, 2, 3}),
        MarginVector({Distribution::pareto(3, 1), Distribution::pareto(4, 2), Distribution::pareto(5, 3)})};
    for (const auto& F : settings) {
      const double es = worst_case_es(0.95, F);
      for (unsigned k = 0; k <= 10; ++k) {
        worst = std::max(worst, rel(worst_case_es(0.95, quantile_mixture(matrix_power(L, k), F)), es));
      }
    }
    return Outcome{worst <= 1e-8, "max scaled diff " + num(worst)};
  });

  report(10, "figure 5 RA curve decreases beyond noise", 300.0, [&] {
    auto cfg = load_experiment(args.configs + "/figure5.json");
    cfg.engines = {Engine::ra};
    if (cfg.ra_seeds != 5) return Outcome{false, "figure5 config must use 5 seeds"};
    const auto out = run_figure5(cfg);
    std::vector<double> v;
    std::vector<double> sd;
    for (const auto& r : out.rows) {
      if (r.kind != MixtureKind::quantile || r.engine != Engine::ra) continue;
      v.push_back(r.value);
      sd.push_back(r.ra_sd.value_or(0.0));
    }
    double best = -kInfinity;
    for (std::size_t i = 1; i < v.size(); ++i) {
      const double noise = std::sqrt(sd[i - 1] * sd[i - 1] + sd[i] * sd[i]);
      best = std::max(best, (v[i - 1] - v[i]) / std::max(noise, 1e-300));
    }
    const bool ok = out.non_monotone_detected && detect_decrease(v, sd);
    return Outcome{ok, "largest drop / noise " + num(best)};
  });

  report(11, "RA below and close to the dual", 0.0, [&] {
    double above = -kInfinity;
    double gap = 0.0;
    int count = 0;
    for (const auto& s : figures) {
      for (const auto& r : s.out.rows) {
        if (r.engine != Engine::dual || r.exactness != Exactness::exact) continue;
        const auto* ra = s.find(r.k, r.kind, Engine::ra);
        if (!ra || !ra->error.empty()) return Outcome{false, s.name + ": missing RA row"};
        above = std::max(above, (ra->value - r.value) / r.value);
        gap = std::max(gap, (r.value - ra->value) / r.value);
        ++count;
      }
    }
    const MarginVector U({Distribution::uniform(0, 1), Distribution::uniform(0, 2), Distribution::uniform(0, 3)});
    for (double p : {0.9, 0.95}) {
      const double d = worst_case_var(p, U).value;
      const double ra = ra_worst_case_var(p, U, 10000).value;
      above = std::max(above, (ra - d) / d);
      gap = std::max(gap, (d - ra) / d);
      ++count;
    }
    return Outcome{count > 0 && above <= 1e-4 && gap < 1e-2,
                   std::to_string(count) + " settings, max RA excess " + num(above) + ", max gap " + num(gap)};
  });

  report(12, "Bernoulli joint mixability", 0.0, [] {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int mismatches = 0;
    int feasible = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t n = 2 + trial % 7;
      std::vector<double> q(n);
      for (double& v : q) v = unif(rng);
      if (trial % 2 == 0) {
        const double s = std::accumulate(q.begin(), q.end() - 1, 0.0);
        const double target = std::ceil(s);
        if (target - s <= 1.0) q[n - 1] = target - s;
      }
      const double total = std::accumulate(q.begin(), q.end(), 0.0);
      const bool rule = std::abs(total - std::round(total)) <= 1e-12;
      const auto cert = bernoulli_jm(q);
      if (cert.feasible != rule) {
        ++mismatches;
        continue;
      }
      if (!cert.feasible) continue;
      ++feasible;
      const int center = static_cast<int>(std::round(*cert.center));
      std::vector<double> ends{0.0, 1.0};
      for (const auto& a : cert.construction) {
        ends.push_back(a.start);
        ends.push_back(std::fmod(a.start + a.length, 1.0));
      }
      std::sort(ends.begin(), ends.end());
      for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
        if (ends[i + 1] - ends[i] < 1e-12) continue;
        if (cert.coverage(0.5 * (ends[i] + ends[i + 1])) != center) ++mismatches;
      }
    }
    return Outcome{mismatches == 0, std::to_string(feasible) + " feasible, " + std::to_string(mismatches) +
                                        " mismatches"};
  });

  report(13, "weighted p-merging constants", 600.0, [] {
    std::mt19937_64 rng(31);
    std::exponential_distribution<double> e(1.0);
    double worst = 0.0;
    int violations = 0;
    for (double r : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
      for (std::size_t n : {2u, 3u, 5u}) {
        const double sym = p_merge_constant(r, std::vector<double>(n, 1.0 / static_cast<double>(n))).value;
        for (int t = 0; t < 10; ++t) {
          std::vector<double> w(n);
          for (double& v : w) v = e(rng);
          const double s = std::accumulate(w.begin(), w.end(), 0.0);
          for (double& v : w) v /= s;
          const double a = p_merge_constant(r, w).value;
          worst = std::max(worst, a / sym - 1.0);
          if (a > sym * (1.0 + 1e-4)) ++violations;
        }
      }
    }
    return Outcome{violations == 0, "max a_w / a_n - 1 = " + num(worst)};
  });

  report(14, "location shift adds sum x", 0.0, [] {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<Distribution> base;
      std::vector<Distribution> moved;
      double shift = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double lam = 0.2 + 3.0 * u(rng);
        const double x = 4.0 * u(rng) - 2.0;
        shift += x;
        base.push_back(Distribution::pareto(3.0, 1.0).scaled(lam));
        moved.push_back(base.back().shifted(x));
      }
      const double a = worst_case_var(0.95, MarginVector(base)).value;
      const double b = worst_case_var(0.95, MarginVector(moved)).value;
      worst = std::max(worst, std::abs(b - a - shift));
    }
    return Outcome{worst <= 1e-8, "max abs diff " + num(worst)};
  });

  report(15, "CLI sweep is reproducible", 0.0, [&] {
    const std::string cfg = args.configs + "/figure1a.json";
    std::vector<std::vector<std::vector<std::string>>> runs;
    for (int run = 0; run < 2; ++run) {
      const std::string out = args.workdir + "/acceptance_run" + std::to_string(run) + ".csv";
      const std::string cmd = "\"" + args.cli + "\" sweep --config \"" + cfg + "\" --seed 7 --quiet --out \"" + out + "\"";
      const int status = std::system(cmd.c_str());
      // 3 means some row did not converge; the CSV is still complete
      const int rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      if (rc != 0 && rc != 3) return Outcome{false, "cli exit status " + std::to_string(rc)};
      runs.push_back(read_csv(out));
    }
    const auto& a = runs[0];
    const auto& b = runs[1];
    if (a.size() < 2 || a.size() != b.size()) return Outcome{false, "row counts differ or empty"};
    const auto& header = a[0];
    const auto wall = std::find(header.begin(), header.end(), "wall_ms") - header.begin();
    std::size_t cells = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].size() != b[i].size()) return Outcome{false, "row " + std::to_string(i) + " differs in width"};
      for (std::size_t j = 0; j < a[i].size(); ++j) {
        if (static_cast<std::ptrdiff_t>(j) == wall) continue;
        if (a[i][j] != b[i][j]) return Outcome{false, "row " + std::to_string(i) + " column " + header[j]};
        ++cells;
      }
    }
    return Outcome{true, std::to_string(a.size() - 1) + " rows, " + std::to_string(cells) + " cells identical"};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
