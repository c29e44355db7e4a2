#include "riskagg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <thread>

#include "riskagg/mixtures.hpp"
#include "riskagg/rearrangement.hpp"

namespace riskagg {
namespace {

struct Task {
  unsigned k;
  MixtureKind kind;
  Engine engine;
};

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<unsigned>(std::min<std::size_t>(hw, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

SweepOutput run_tasks(const ExperimentConfig& cfg, bool figure5) {
  const MarginVector F(cfg.margins);
  std::vector<Task> tasks;
  for (unsigned k : cfg.k_list) {
    for (MixtureKind kind : {MixtureKind::quantile, MixtureKind::distribution}) {
      for (Engine e : cfg.engines) tasks.push_back({k, kind, e});
    }
  }

  OptimizerOptions opts = cfg.optimizer;
  if (opts.threads == 0 && std::thread::hardware_concurrency() > 1) opts.threads = 1;  // rows already run in parallel

  SweepOutput out;
  out.figure5 = figure5;
  out.rows.resize(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t t) {
    const Task& task = tasks[t];
    SweepRow& row = out.rows[t];
    row.k = task.k;
    row.kind = task.kind;
    row.engine = task.engine;
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto Lk = matrix_power(cfg.lambda, task.k);
      const MarginVector M = task.kind == MixtureKind::quantile ? quantile_mixture(Lk, F) : distribution_mixture(Lk, F);
      switch (task.engine) {
        case Engine::dual: {
          const BoundResult r = worst_case_var(cfg.p, M, opts);
          row.value = r.value;
          row.exactness = r.exactness;
          row.converged = r.converged;
          row.beta_star = r.beta_star;
          break;
        }
        case Engine::es:
          row.value = worst_case_es(cfg.p, M);
          row.exactness = Exactness::exact;
          break;
        case Engine::ra: {
          const int seeds = figure5 ? cfg.ra_seeds : 1;
          const auto Q = discretize_tail(cfg.p, M.margins(), cfg.ra_n);
          std::vector<double> values;
          for (int s = 0; s < seeds; ++s) {
            RAOptions ra;
            ra.seed = cfg.optimizer.seed + static_cast<std::uint64_t>(s);
            const auto res = rearrange(Q, ra);
            values.push_back(res.lower_var);
            row.converged = row.converged && res.sweeps < ra.max_sweeps;
          }
          row.value = mean_of(values);
          row.exactness = Exactness::lower_bound;
          if (figure5) row.ra_sd = sd_of(values);
          break;
        }
      }
    } catch (const std::exception& e) {
      row.value = std::numeric_limits<double>::quiet_NaN();
      row.converged = false;
      row.error = e.what();
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  });

  for (const auto& r : out.rows) {
    out.any_nonconverged = out.any_nonconverged || !r.converged;
    out.any_error = out.any_error || !r.error.empty();
  }
  if (figure5) {
    std::vector<double> values;
    std::vector<double> sds;
    for (const auto& r : out.rows) {
      if (r.kind == MixtureKind::quantile && r.engine == Engine::ra && r.error.empty()) {
        values.push_back(r.value);
        sds.push_back(r.ra_sd.value_or(0.0));
      }
    }
    out.non_monotone_detected = detect_decrease(values, sds);
  }
  return out;
}

}  // namespace

bool detect_decrease(const std::vector<double>& values, const std::vector<double>& sds) {
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double drop = values[i] - values[i + 1];
    const double noise = std::sqrt(sds[i] * sds[i] + sds[i + 1] * sds[i + 1]);
    // floor keeps pure rounding from counting when the seeds agree exactly
    const double floor = 1e-12 * std::max(std::abs(values[i]), std::abs(values[i + 1]));
    if (drop > 3.0 * noise && drop > floor) return true;
  }
  return false;
}

SweepOutput run_sweep(const ExperimentConfig& cfg) { return run_tasks(cfg, false); }

SweepOutput run_figure5(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  if (std::find(c.engines.begin(), c.engines.end(), Engine::ra) == c.engines.end()) c.engines.push_back(Engine::ra);
  return run_tasks(c, true);
}

SweepOutput run_experiment(const ExperimentConfig& cfg) {
  return cfg.mode == ExperimentMode::figure5 ? run_figure5(cfg) : run_sweep(cfg);
}

void write_csv(const SweepOutput& out, std::ostream& os) {
  os << "k,kind,engine,value,exactness,converged,beta_star,wall_ms";
  if (out.figure5) os << ",ra_sd";
  os << '\n';
  for (const auto& r : out.rows) {
    std::string beta;
    if (r.beta_star) {
      for (std::size_t i = 0; i < r.beta_star->size(); ++i) {
        if (i) beta += ';';
        beta += format_number((*r.beta_star)[i]);
      }
    }
    os << r.k << ',' << to_string(r.kind) << ',' << to_string(r.engine) << ',' << format_number(r.value) << ','
       << (r.error.empty() ? to_string(r.exactness) : "error") << ',' << (r.converged ? "true" : "false") << ','
       << beta << ',' << format_number(r.wall_ms);
    if (out.figure5) os << ',' << (r.ra_sd ? format_number(*r.ra_sd) : "");
    os << '\n';
  }
}

nlohmann::json run_metadata(const ExperimentConfig& cfg, const SweepOutput& out) {
  nlohmann::json meta;
  meta["name"] = cfg.name;
  meta["config"] = cfg.source;
  meta["seed"] = cfg.optimizer.seed;
  meta["version"] = "0.1.0";
  meta["columns"] = out.figure5
                        ? std::vector<std::string>{"k", "kind", "engine", "value", "exactness", "converged",
                                                   "beta_star", "wall_ms", "ra_sd"}
                        : std::vector<std::string>{"k", "kind", "engine", "value", "exactness", "converged",
                                                   "beta_star", "wall_ms"};
  meta["any_nonconverged"] = out.any_nonconverged;
  meta["any_error"] = out.any_error;
  if (out.figure5) meta["non_monotone_detected"] = out.non_monotone_detected;
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& r : out.rows) {
    if (!r.error.empty()) {
      errors.push_back({{"k", r.k}, {"kind", to_string(r.kind)}, {"engine", to_string(r.engine)}, {"error", r.error}});
    }
  }
  meta["errors"] = errors;
  return meta;
}

}  // namespace riskagg
