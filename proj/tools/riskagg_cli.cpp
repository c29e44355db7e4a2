#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "riskagg/applications.hpp"
#include "riskagg/bounds.hpp"
#include "riskagg/config.hpp"
#include "riskagg/experiment.hpp"
#include "riskagg/rearrangement.hpp"

namespace {

using namespace riskagg;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;

struct Common {
  std::string config;
  std::string out;
  long long seed = -1;
  std::string engines;
  bool quiet = false;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

void apply_overrides(ExperimentConfig& cfg, const Common& c) {
  if (c.seed >= 0) {
    cfg.optimizer.seed = static_cast<std::uint64_t>(c.seed);
    cfg.source["optimizer"]["seed"] = c.seed;
  }
  if (!c.engines.empty()) {
    cfg.engines.clear();
    std::stringstream ss(c.engines);
    std::string e;
    nlohmann::json list = nlohmann::json::array();
    while (std::getline(ss, e, ',')) {
      cfg.engines.push_back(parse_engine(e));
      list.push_back(e);
    }
    if (cfg.engines.empty()) throw ConfigError("--engines: empty list");
    cfg.source["engines"] = list;
  }
  if (!c.out.empty()) cfg.output = c.out;
}

int run_experiment_command(const Common& c, bool figure5) {
  ExperimentConfig cfg = load_experiment(c.config);
  apply_overrides(cfg, c);
  if (figure5) cfg.mode = ExperimentMode::figure5;
  const SweepOutput out = run_experiment(cfg);

  std::ostringstream csv;
  write_csv(out, csv);
  if (cfg.output.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(cfg.output);
    if (!f) throw ConfigError("cannot write '" + cfg.output + "'");
    f << csv.str();
    std::ofstream meta(cfg.output + ".meta.json");
    meta << run_metadata(cfg, out).dump(2) << '\n';
    if (!c.quiet) std::cerr << "wrote " << cfg.output << " (" << out.rows.size() << " rows)\n";
  }
  if (!c.quiet) {
    for (const auto& r : out.rows) {
      if (!r.error.empty()) {
        std::cerr << "k=" << r.k << ' ' << to_string(r.kind) << ' ' << to_string(r.engine) << ": " << r.error << '\n';
      }
    }
    if (out.figure5) std::cerr << "non_monotone_detected=" << (out.non_monotone_detected ? "true" : "false") << '\n';
  }
  return out.any_nonconverged ? kExitNotConverged : kExitOk;
}

void add_common(CLI::App* sub, Common& c, bool config_required) {
  auto* opt = sub->add_option("--config", c.config, "JSON configuration file");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "output CSV path (metadata goes to PATH.meta.json)");
  sub->add_option("--seed", c.seed, "optimizer / RA seed, overrides the config");
  sub->add_option("--engines", c.engines, "comma-separated subset of dual,ra,es");
  sub->add_flag("--quiet", c.quiet, "suppress progress output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case VaR and ES under dependence uncertainty"};
  app.require_subcommand(1);

  Common sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "sweep L^k quantile and distribution mixtures over k");
  add_common(sweep, sweep_opts, true);

  Common fig5_opts;
  auto* fig5 = app.add_subcommand("figure5", "RA sweep with seed noise and a non-monotonicity verdict");
  add_common(fig5, fig5_opts, true);

  Common bound_opts;
  std::size_t bound_ra_n = 10000;
  auto* bound = app.add_subcommand("bound", "worst-case VaR/ES for the margins and p in a config");
  add_common(bound, bound_opts, true);
  bound->add_option("--ra-n", bound_ra_n, "RA discretization size");

  double pm_r = -1.0;
  std::string pm_weights;
  long long pm_seed = -1;
  auto* pmerge = app.add_subcommand("pmerge", "p-merging constant a_{r,w}");
  pmerge->add_option("--r", pm_r, "exponent r (finite)")->required();
  pmerge->add_option("--weights", pm_weights, "comma-separated weights on the simplex")->required();
  pmerge->add_option("--seed", pm_seed, "optimizer seed");

  double pf_p = 0.95;
  std::string pf_dist;
  std::string pf_weights;
  std::string pf_measure = "var";
  long long pf_seed = -1;
  auto* portfolio = app.add_subcommand("portfolio", "worst-case risk of a weighted portfolio of identical risks");
  portfolio->add_option("--p", pf_p, "level in (0,1)");
  portfolio->add_option("--dist", pf_dist, "distribution JSON, e.g. {\"family\":\"pareto\",\"alpha\":3,\"theta\":1}")
      ->required();
  portfolio->add_option("--weights", pf_weights, "comma-separated weights on the simplex")->required();
  portfolio->add_option("--measure", pf_measure, "var or es")->check(CLI::IsMember({"var", "es"}));
  portfolio->add_option("--seed", pf_seed, "optimizer seed");

  std::string jm_q;
  auto* jm_bern = app.add_subcommand("jm-bernoulli", "joint mixability of Bernoulli margins");
  jm_bern->add_option("--q", jm_q, "comma-separated Bernoulli parameters")->required();

  std::string ml_margins;
  std::string ml_config;
  auto* jm_ml = app.add_subcommand("jm-meanlength", "mean-length condition for decreasing densities");
  jm_ml->add_option("--margins", ml_margins, "JSON array of distributions");
  jm_ml->add_option("--config", ml_config, "JSON file with a 'margins' array")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) return run_experiment_command(sweep_opts, false);
    if (*fig5) return run_experiment_command(fig5_opts, true);

    if (*bound) {
      const auto j = read_json_file(bound_opts.config);
      if (!j.contains("p") || !j.contains("margins")) throw ConfigError("bound: config needs 'p' and 'margins'");
      const double p = j.at("p").get<double>();
      if (!(p > 0.0 && p < 1.0)) throw ConfigError("bound: p must lie in (0, 1)");
      const auto margins = parse_margins(j.at("margins"));
      if (margins.size() < 2) throw ConfigError("bound: need at least two margins");
      OptimizerOptions opts = j.contains("optimizer") ? parse_optimizer(j.at("optimizer")) : OptimizerOptions{};
      if (bound_opts.seed >= 0) opts.seed = static_cast<std::uint64_t>(bound_opts.seed);
      std::vector<Engine> engines{Engine::dual, Engine::es};
      if (!bound_opts.engines.empty()) {
        engines.clear();
        std::stringstream ss(bound_opts.engines);
        std::string e;
        while (std::getline(ss, e, ',')) engines.push_back(parse_engine(e));
      }
      const MarginVector F(margins);
      bool converged = true;
      std::cout << "engine,value,exactness,converged,beta_star\n";
      for (Engine e : engines) {
        BoundResult r;
        if (e == Engine::dual) {
          r = worst_case_var(p, F, opts);
        } else if (e == Engine::es) {
          r.value = worst_case_es(p, F);
          r.exactness = Exactness::exact;
          r.converged = true;
        } else {
          RAOptions ra;
          ra.seed = opts.seed;
          r = ra_worst_case_var(p, F, bound_ra_n, ra);
        }
        converged = converged && r.converged;
        std::string beta;
        if (r.beta_star) {
          for (std::size_t i = 0; i < r.beta_star->size(); ++i) beta += (i ? ";" : "") + fmt((*r.beta_star)[i]);
        }
        std::cout << to_string(e) << ',' << fmt(r.value) << ',' << to_string(r.exactness) << ','
                  << (r.converged ? "true" : "false") << ',' << beta << '\n';
      }
      return converged ? kExitOk : kExitNotConverged;
    }

    if (*pmerge) {
      OptimizerOptions opts;
      if (pm_seed >= 0) opts.seed = static_cast<std::uint64_t>(pm_seed);
      const auto w = parse_list(pm_weights);
      const auto res = p_merge_constant(pm_r, w, opts);
      std::cout << "a=" << fmt(res.value) << "\ncross_check=" << fmt(res.cross_check)
                << "\nflagged=" << (res.flagged ? "true" : "false") << '\n';
      return res.inner.converged ? kExitOk : kExitNotConverged;
    }

    if (*portfolio) {
      OptimizerOptions opts;
      if (pf_seed >= 0) opts.seed = static_cast<std::uint64_t>(pf_seed);
      nlohmann::json dj;
      try {
        dj = nlohmann::json::parse(pf_dist);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("--dist: ") + e.what());
      }
      const auto F = parse_distribution(dj);
      const auto w = parse_list(pf_weights);
      const auto r = portfolio_worst_case(pf_p, F, w, pf_measure == "es" ? RiskMeasure::es : RiskMeasure::var, opts);
      std::cout << "value=" << fmt(r.value) << "\nexactness=" << to_string(r.exactness)
                << "\nconverged=" << (r.converged ? "true" : "false") << '\n';
      return r.converged ? kExitOk : kExitNotConverged;
    }

    if (*jm_bern) {
      const auto q = parse_list(jm_q);
      const auto cert = bernoulli_jm(q);
      std::cout << "feasible=" << (cert.feasible ? "true" : "false") << '\n';
      if (cert.center) std::cout << "center=" << fmt(*cert.center) << '\n';
      for (const auto& a : cert.construction) std::cout << "arc start=" << fmt(a.start) << " length=" << fmt(a.length) << '\n';
      return kExitOk;
    }

    if (*jm_ml) {
      nlohmann::json j;
      if (!ml_config.empty()) {
        j = read_json_file(ml_config).at("margins");
      } else if (!ml_margins.empty()) {
        try {
          j = nlohmann::json::parse(ml_margins);
        } catch (const nlohmann::json::exception& e) {
          throw ConfigError(std::string("--margins: ") + e.what());
        }
      } else {
        throw ConfigError("jm-meanlength: pass --margins or --config");
      }
      const MarginVector F(parse_margins(j));
      std::cout << "mean_length_condition=" << (mean_length_jm_check(F) ? "true" : "false") << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
