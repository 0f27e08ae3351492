#pragma once

#include <string>
#include <vector>

#include "monoflow/catalog.hpp"
#include "monoflow/diagnostics.hpp"
#include "monoflow/experiments.hpp"
#include "monoflow/omega.hpp"

namespace monoflow {

// Reads a JSON config file: missing/unreadable file -> IoError, malformed
// JSON -> ConfigError.  Schema checks happen in the parse_* functions.
Json load_config_file(const std::string& path);

// simulate config: { schema_version, scenario, parameters?, custom?,
// outputs?, seed?, refine? }.  Unknown keys are rejected at every level, and
// parameters must name entries of the scenario's default set.
ExperimentConfig parse_experiment(const Json& root);

// omega config: { schema_version, psi, phi, eps, dual?, tol?, max_iters?,
// out? } where eps is an explicit array or {from, to, per_decade}.
struct OmegaJob {
  FunPtr psi;
  FunPtr phi;
  std::vector<double> eps_grid;
  bool dual = false;
  OmegaOptions opts;
  std::string out;  // empty -> stdout
};
OmegaJob parse_omega_job(const Json& root);

// check-conditions config: { schema_version, conditions: [{id, ...}],
// options?, out? }.
struct ConditionEntry {
  std::string id;
  ConditionIngredients ingredients;
};
struct ConditionJob {
  std::vector<ConditionEntry> entries;
  CheckOptions options;
  std::string out;  // empty -> stdout
};
ConditionJob parse_condition_job(const Json& root);

// reproduce path: scenario defaults overlaid with "key=value" strings.
ExperimentConfig make_reproduce_config(const std::string& scenario,
                                       const std::vector<std::string>& params,
                                       const std::string& out_dir, bool svg);

}  // namespace monoflow
