#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskagg/bounds.hpp"
#include "riskagg/distributions.hpp"
#include "riskagg/matrix.hpp"

namespace riskagg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Engine { dual, ra, es };
enum class MixtureKind { quantile, distribution };
enum class ExperimentMode { sweep, figure5 };

const char* to_string(Engine e);
const char* to_string(MixtureKind k);
Engine parse_engine(const std::string& s);

struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentMode mode = ExperimentMode::sweep;
  double p = 0.95;
  std::vector<Distribution> margins;
  DoublyStochasticMatrix lambda = DoublyStochasticMatrix::identity(2);
  std::vector<unsigned> k_list;
  std::vector<Engine> engines;
  std::size_t ra_n = 10000;
  int ra_seeds = 5;
  OptimizerOptions optimizer;
  std::string output;
  /// The parsed document, echoed into run metadata.
  nlohmann::json source;
};

/// {"family": "pareto", "alpha": 3, "theta": 1, "shift": 0, "scale": 1} and
/// the analogous keys per family; see docs/config.md.
Distribution parse_distribution(const nlohmann::json& j);
std::vector<Distribution> parse_margins(const nlohmann::json& j);
/// {"kind": "convex_identity_uniform", "a": 0.8, "n": 3} or {"kind": "explicit", "rows": [[...]]}
DoublyStochasticMatrix parse_matrix(const nlohmann::json& j);
OptimizerOptions parse_optimizer(const nlohmann::json& j);
ExperimentConfig parse_experiment(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
ExperimentConfig load_experiment(const std::string& path);

}  // namespace riskagg
