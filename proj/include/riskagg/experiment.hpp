#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskagg/bounds.hpp"
#include "riskagg/config.hpp"

namespace riskagg {

struct SweepRow {
  unsigned k = 0;
  MixtureKind kind = MixtureKind::quantile;
  Engine engine = Engine::dual;
  double value = 0.0;
  Exactness exactness = Exactness::upper_bound;
  bool converged = true;
  std::optional<BetaVector> beta_star;
  double wall_ms = 0.0;
  /// Spread of RA estimates over seeds (figure-5 runs only).
  std::optional<double> ra_sd;
  /// Nonempty when the engine failed; the row is still emitted.
  std::string error;
};

struct SweepOutput {
  std::vector<SweepRow> rows;
  bool figure5 = false;
  /// Figure-5 verdict: the RA quantile-mixture curve drops by more than
  /// three times the seed noise between consecutive k.
  bool non_monotone_detected = false;
  bool any_nonconverged = false;
  bool any_error = false;
};

/// For each k, worst-case values of L^k (x) F and L^k F with every engine.
/// Rows come out in (k, kind, engine) order whatever the scheduling.
SweepOutput run_sweep(const ExperimentConfig& cfg);

/// RA estimates averaged over cfg.ra_seeds seeds (plus any other requested
/// engines) and the non-monotonicity verdict.
SweepOutput run_figure5(const ExperimentConfig& cfg);

SweepOutput run_experiment(const ExperimentConfig& cfg);

/// Columns k,kind,engine,value,exactness,converged,beta_star,wall_ms
/// (+ ra_sd for figure-5 runs). Numbers are printed with %.17g.
void write_csv(const SweepOutput& out, std::ostream& os);

nlohmann::json run_metadata(const ExperimentConfig& cfg, const SweepOutput& out);

/// Verdict rule shared by run_figure5 and the tests: some consecutive pair
/// decreases by more than 3 * sqrt(sd_a^2 + sd_b^2).
bool detect_decrease(const std::vector<double>& values, const std::vector<double>& sds);

}  // namespace riskagg
