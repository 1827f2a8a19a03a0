#pragma once

// Experiment configuration: JSON schema, built-in presets and algorithm names.

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "amwu/algorithms.hpp"

namespace amwu::harness {

struct AvoidanceSettings {
  long trials = 500;
  double radius = 0.05;
  double classify_radius = 1e-3;
  int grid = 24;     ///< seed lattice resolution for the critical-point catalog
  int threads = 1;   ///< not part of the embedded config; results do not depend on it
};

struct ExperimentConfig {
  std::string objective = "rosenbrock";
  std::vector<std::string> algorithms{"amwu_ragd", "mwu"};
  AmwuMode mode = AmwuMode::ragd;  ///< used by the plain "amwu" entry
  ScheduleParams params;
  std::vector<ScheduleParams> agent_params;  ///< per-agent override, empty for shared
  double r = 3.0;
  std::optional<double> amd_step;  ///< defaults to alpha
  std::optional<double> gamma0;
  LiteralOptions literal;
  std::vector<std::vector<double>> x0;
  std::optional<std::vector<std::vector<double>>> v0;
  long max_iters = 2000;
  double grad_tol = 0.0;
  long trace_every = 1;
  unsigned long long seed = 1;
  std::optional<double> threshold;  ///< compare: f level for first-iteration-below
  AvoidanceSettings avoidance;
  std::string out_dir = "out";
  bool svg = false;
};

/// Raised for malformed configs and unknown names; the CLI maps it to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
ExperimentConfig preset(const std::string& name);

/// Full config, or only the reproducibility-relevant part (no output paths,
/// no thread count) when `embedded` is set.
nlohmann::json to_json(const ExperimentConfig& cfg, bool embedded = false);
/// Missing keys keep the defaults of `base`. Accepts a sidecar document too
/// (its "config" member is used).
ExperimentConfig from_json(const nlohmann::json& j, const ExperimentConfig& base = {});
ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base = {});

/// Checks names and shapes; returns warnings (step bound, mu >= 1).
std::vector<std::string> validate(const ExperimentConfig& cfg);

/// Parses mwu, amwu, amwu_literal, amwu_ragd, amd and amd:R.
AlgorithmSpec parse_algorithm(const std::string& name, const ExperimentConfig& cfg);

ProductPoint starting_point(const ExperimentConfig& cfg);
std::optional<ProductPoint> starting_aux(const ExperimentConfig& cfg);
std::vector<ScheduleParams> schedule_params(const ExperimentConfig& cfg);

}  // namespace amwu::harness
