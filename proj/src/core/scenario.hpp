#pragma once

// Experiment orchestration: scenario configs (JSON or key=value text),
// built-in scenarios, pipeline dispatch and deterministic report files.

#include <cstdint>
#include <string>
#include <utility>

#include "toral_map.hpp"

namespace folia {

struct ScenarioConfig {
  std::string name = "custom";
  int dim = 2;
  IntMat matrix;                 // defaults to the identity when empty
  std::vector<TrigTerm> trig;    // displacement terms of the base map f
  std::vector<TrigTerm> g_trig;  // extra terms defining the perturbed map g
  FoliationKind fol_kind = FoliationKind::Points;
  std::vector<IntVec> directions;

  int grid_n = 64;
  double delta = 0.01;
  double eps = 0.05;
  double eps0 = 0.05;
  double rho = 0.01;
  double eps_prime = 0.0;  // 0 -> eps / 8
  long long horizon = 20;
  long long kmax = 50;
  int samples = 100;       // sample chains for the set-valued map
  int chain_length = 5;    // forward-closure depth per sample chain
  int trials = 20;         // randomized trials (shadow / quotient pipelines)
  int orbit_length = 20;   // pseudo-orbit length for randomized trials

  long long expansivity_horizon = 50;
  std::vector<double> e_list;     // expansivity scan; empty -> {2*eps0}
  double eps0_factor = 0.0;       // per-e eps0 = factor * e; 0 -> use eps0
  double rho_factor = 0.0;        // per-e rho = factor * e; 0 -> use rho
  bool expect_witness = false;    // expansivity-scan pass criterion

  bool periodic_leaves = false;   // cr-set: certify every recurrent cell
  std::vector<double> delta_sweep{1e-1, 1e-2, 1e-3};

  uint64_t seed = 1;
  std::string out_dir = "out";
};

// Parses a JSON object (field diagnostics in the ConfigError message).
ScenarioConfig parse_config_json(const std::string& text);

// Key = value text with [section] headers; a leading '{' switches to JSON.
ScenarioConfig parse_config_text(const std::string& text);

ScenarioConfig load_config_file(const std::string& path);

ScenarioConfig builtin_scenario(const std::string& name);
std::vector<std::pair<std::string, std::string>> list_scenarios();

ToralMap scenario_map(const ScenarioConfig& cfg);            // f
ToralMap scenario_perturbed_map(const ScenarioConfig& cfg);  // g
LinearFoliation scenario_foliation(const ScenarioConfig& cfg);

struct RunResult {
  bool all_passed = false;
  std::string report_json;               // the aggregate report, also on disk
  std::vector<std::string> files_written;
};

// pipeline: cr-set | shadow | semiconj | expansivity-scan | quotient | all.
// Writes reports under cfg.out_dir (atomic rename); per-step module errors
// are recorded in the report and independent steps keep running.
RunResult run_scenario(const ScenarioConfig& cfg, const std::string& pipeline);

}  // namespace folia
