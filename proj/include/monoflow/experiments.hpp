#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "monoflow/catalog.hpp"
#include "monoflow/diagnostics.hpp"
#include "monoflow/integrator.hpp"
#include "monoflow/types.hpp"

namespace monoflow {

struct OutputRequest {
  std::string dir;  // empty = no files written
  bool trajectory_csv = true;
  bool summary = true;
  bool conditions_csv = true;
  bool svg = false;
  long stride = 1;  // trajectory CSV row thinning (final node always kept)
};

// Scenario run request: flat numeric/string parameters overlay the scenario
// defaults; "custom" carries a full problem spec instead.
struct ExperimentConfig {
  std::string scenario;
  std::map<std::string, double> num;
  std::map<std::string, std::string> str;
  Json custom;
  OutputRequest outputs;
  unsigned long seed = 0;
  bool refine = false;  // rerun at h/2 and report the final-state delta
};

struct RunSummary {
  std::string scenario;
  Trajectory trajectory;
  Vec final_state;
  double final_distance_to_target = std::numeric_limits<double>::quiet_NaN();
  std::vector<ConditionVerdict> conditions;
  std::vector<std::pair<std::string, double>> metrics;  // insertion-ordered
  std::vector<std::string> notes;
  double wallclock_seconds = 0.0;
  std::optional<double> grid_refinement_delta;

  // optional derived trajectory-CSV columns
  SetPtr target;                                      // -> dist_S
  std::function<ExtReal(double, const Vec&)> energy;  // -> energy
  bool csv_ergodic = false;                           // -> ergavg_1..n
};

// Defaults for every scenario (the parameter schema doubles as documentation).
ExperimentConfig default_config(const std::string& scenario);

RunSummary run_two_d(const ExperimentConfig& cfg);
RunSummary run_pde_neumann(const ExperimentConfig& cfg);
RunSummary run_tikhonov(const ExperimentConfig& cfg);
RunSummary run_sweeping(const ExperimentConfig& cfg);
RunSummary run_quasi_autonomous(const ExperimentConfig& cfg);
RunSummary run_rotation_ergodic(const ExperimentConfig& cfg);
RunSummary run_custom(const ExperimentConfig& cfg);

// Dispatch on cfg.scenario, then handle the optional h/2 refinement rerun.
RunSummary run_scenario(const ExperimentConfig& cfg);

// Rendered trajectory CSV (header t,x_1..x_n,residual[,dist_S,energy,
// ergavg_*]; 17 significant digits).  Exposed so tests can check determinism
// without touching the filesystem.
std::string trajectory_csv(const RunSummary& run, long stride = 1);

// "key = value" rendering of the run (the summary.txt body).
std::string summary_text(const RunSummary& run);

// One CSV row per verdict; partial sums joined with '|', evidence quoted.
std::string conditions_csv(const std::vector<ConditionVerdict>& conditions);

void emit_outputs(const RunSummary& run, const OutputRequest& out);

}  // namespace monoflow
