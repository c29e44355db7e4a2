#include "riskagg/config.hpp"

#include <fstream>
#include <set>

namespace riskagg {
namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + ": expected a JSON object");
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& what) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) throw ConfigError(what + ": unknown key '" + key + "'");
  }
}

double number(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw ConfigError(what + ": missing '" + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(what + ": '" + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& what) {
  return j.contains(key) ? number(j, key, what) : fallback;
}

long integer(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw ConfigError(what + ": missing '" + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(what + ": '" + key + "' must be an integer");
  return v.get<long>();
}

}  // namespace

const char* to_string(Engine e) {
  switch (e) {
    case Engine::dual: return "dual";
    case Engine::ra: return "ra";
    case Engine::es: return "es";
  }
  return "?";
}

const char* to_string(MixtureKind k) {
  return k == MixtureKind::quantile ? "quantile" : "distribution";
}

Engine parse_engine(const std::string& s) {
  if (s == "dual") return Engine::dual;
  if (s == "ra") return Engine::ra;
  if (s == "es") return Engine::es;
  throw ConfigError("unknown engine '" + s + "' (expected dual, ra or es)");
}

Distribution parse_distribution(const json& j) {
  require_object(j, "distribution");
  if (!j.contains("family") || !j.at("family").is_string()) throw ConfigError("distribution: missing 'family'");
  const std::string family = j.at("family").get<std::string>();
  const std::string what = "distribution '" + family + "'";
  std::set<std::string> keys{"family", "shift", "scale"};
  auto with = [&](std::initializer_list<const char*> extra) {
    for (const char* k : extra) keys.insert(k);
    reject_unknown_keys(j, keys, what);
  };

  try {
    Distribution d = [&]() -> Distribution {
      if (family == "pareto") {
        with({"alpha", "theta"});
        return Distribution::pareto(number(j, "alpha", what), number(j, "theta", what));
      }
      if (family == "uniform") {
        with({"a", "b"});
        return Distribution::uniform(number(j, "a", what), number(j, "b", what));
      }
      if (family == "gamma") {
        with({"shape", "theta"});
        return Distribution::gamma(number(j, "shape", what), number(j, "theta", what));
      }
      if (family == "weibull") {
        with({"lambda", "k"});
        return Distribution::weibull(number(j, "lambda", what), number(j, "k", what));
      }
      if (family == "lognormal") {
        with({"mu", "sigma"});
        return Distribution::lognormal(number(j, "mu", what), number(j, "sigma", what));
      }
      if (family == "binomial") {
        with({"m", "q"});
        return Distribution::binomial(static_cast<int>(integer(j, "m", what)), number(j, "q", what));
      }
      if (family == "bernoulli") {
        with({"q"});
        return Distribution::bernoulli(number(j, "q", what));
      }
      if (family == "point_mass") {
        with({"x"});
        return Distribution::point_mass(number(j, "x", what));
      }
      if (family == "exponential") {
        with({"rate"});
        return Distribution::exponential(number(j, "rate", what));
      }
      if (family == "power_function") {
        with({"c"});
        return Distribution::power_function(number(j, "c", what));
      }
      throw ConfigError("distribution: unknown family '" + family + "'");
    }();
    return d.scaled(number_or(j, "scale", 1.0, what)).shifted(number_or(j, "shift", 0.0, what));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

std::vector<Distribution> parse_margins(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("margins: expected a nonempty array");
  std::vector<Distribution> out;
  for (const auto& d : j) out.push_back(parse_distribution(d));
  return out;
}

DoublyStochasticMatrix parse_matrix(const json& j) {
  require_object(j, "lambda");
  if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError("lambda: missing 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "convex_identity_uniform") {
      reject_unknown_keys(j, {"kind", "a", "n"}, "lambda");
      const long n = integer(j, "n", "lambda");
      if (n < 2) throw ConfigError("lambda: n must be at least 2");
      return DoublyStochasticMatrix::convex_identity_uniform(number(j, "a", "lambda"), static_cast<std::size_t>(n));
    }
    if (kind == "identity" || kind == "uniform") {
      reject_unknown_keys(j, {"kind", "n"}, "lambda");
      const long n = integer(j, "n", "lambda");
      if (n < 2) throw ConfigError("lambda: n must be at least 2");
      return kind == "identity" ? DoublyStochasticMatrix::identity(static_cast<std::size_t>(n))
                                : DoublyStochasticMatrix::uniform(static_cast<std::size_t>(n));
    }
    if (kind == "explicit") {
      reject_unknown_keys(j, {"kind", "rows"}, "lambda");
      if (!j.contains("rows")) throw ConfigError("lambda: missing 'rows'");
      return DoublyStochasticMatrix(j.at("rows").get<std::vector<std::vector<double>>>());
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("lambda: ") + e.what());
  }
  throw ConfigError("lambda: unknown kind '" + kind + "'");
}

OptimizerOptions parse_optimizer(const json& j) {
  require_object(j, "optimizer");
  reject_unknown_keys(j, {"restarts", "seed", "max_evals", "tol", "threads"}, "optimizer");
  OptimizerOptions o;
  if (j.contains("restarts")) o.restarts = static_cast<int>(integer(j, "restarts", "optimizer"));
  if (j.contains("seed")) o.seed = static_cast<std::uint64_t>(integer(j, "seed", "optimizer"));
  if (j.contains("max_evals")) o.max_evals = static_cast<int>(integer(j, "max_evals", "optimizer"));
  if (j.contains("tol")) o.tol = number(j, "tol", "optimizer");
  if (j.contains("threads")) o.threads = static_cast<unsigned>(integer(j, "threads", "optimizer"));
  if (o.restarts < 0 || o.max_evals <= 0 || !(o.tol > 0.0)) throw ConfigError("optimizer: values out of range");
  return o;
}

ExperimentConfig parse_experiment(const json& j) {
  require_object(j, "experiment");
  reject_unknown_keys(j, {"name", "mode", "p", "margins", "lambda", "k", "engines", "ra_n", "ra_seeds", "optimizer",
                          "output", "description"},
                      "experiment");
  ExperimentConfig c;
  c.source = j;
  if (j.contains("name")) c.name = j.at("name").get<std::string>();
  if (j.contains("mode")) {
    const auto m = j.at("mode").get<std::string>();
    if (m == "sweep") {
      c.mode = ExperimentMode::sweep;
    } else if (m == "figure5") {
      c.mode = ExperimentMode::figure5;
    } else {
      throw ConfigError("experiment: unknown mode '" + m + "'");
    }
  }
  c.p = number(j, "p", "experiment");
  if (!(c.p > 0.0 && c.p < 1.0)) throw ConfigError("experiment: p must lie in (0, 1)");
  if (!j.contains("margins")) throw ConfigError("experiment: missing 'margins'");
  c.margins = parse_margins(j.at("margins"));
  if (c.margins.size() < 2) throw ConfigError("experiment: need at least two margins");
  if (!j.contains("lambda")) throw ConfigError("experiment: missing 'lambda'");
  c.lambda = parse_matrix(j.at("lambda"));
  if (c.lambda.size() != c.margins.size()) throw ConfigError("experiment: lambda and margins differ in dimension");
  if (!j.contains("k") || !j.at("k").is_array() || j.at("k").empty()) {
    throw ConfigError("experiment: 'k' must be a nonempty array");
  }
  for (const auto& k : j.at("k")) {
    if (!k.is_number_integer() || k.get<long>() < 0) throw ConfigError("experiment: k values must be nonnegative integers");
    c.k_list.push_back(static_cast<unsigned>(k.get<long>()));
  }
  if (j.contains("engines")) {
    for (const auto& e : j.at("engines")) c.engines.push_back(parse_engine(e.get<std::string>()));
  } else {
    c.engines = {Engine::dual};
  }
  if (c.engines.empty()) throw ConfigError("experiment: engines must be nonempty");
  if (j.contains("ra_n")) {
    const long n = integer(j, "ra_n", "experiment");
    if (n < 2) throw ConfigError("experiment: ra_n must be at least 2");
    c.ra_n = static_cast<std::size_t>(n);
  }
  if (j.contains("ra_seeds")) {
    c.ra_seeds = static_cast<int>(integer(j, "ra_seeds", "experiment"));
    if (c.ra_seeds < 1) throw ConfigError("experiment: ra_seeds must be positive");
  }
  if (j.contains("optimizer")) c.optimizer = parse_optimizer(j.at("optimizer"));
  if (j.contains("output")) c.output = j.at("output").get<std::string>();
  return c;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

ExperimentConfig load_experiment(const std::string& path) {
  try {
    return parse_experiment(read_json_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

}  // namespace riskagg
