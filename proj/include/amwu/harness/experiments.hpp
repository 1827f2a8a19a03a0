#pragma once

// The CLI's experiments: trace runs, comparison tables, Monte-Carlo saddle
// avoidance and per-saddle spectra.

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "amwu/harness/config.hpp"
#include "amwu/spectral.hpp"

namespace amwu::harness {

Trace run_algorithm(const ExperimentConfig& cfg, const std::string& algorithm, bool keep_points = true);

/// "<objective>_<algorithm>", with "amd:R" written as "amd_rR".
std::string file_stem(const ExperimentConfig& cfg, const std::string& algorithm);

/// Embedded config, algorithm, warnings, schedule trace and content hash.
nlohmann::json sidecar(const ExperimentConfig& cfg, const std::string& algorithm, const Trace& trace);

struct RunOutput {
  std::string algorithm;
  Trace trace;
  std::string csv_path;
  std::string sidecar_path;
};

struct RunResult {
  std::vector<RunOutput> runs;
  std::vector<std::string> warnings;
  std::string svg_path;  ///< empty unless requested
};

/// One CSV and sidecar per algorithm under cfg.out_dir, plus the SVG when cfg.svg.
RunResult cli_run(const ExperimentConfig& cfg);

/// Mean squared difference of successive f values.
double smoothness(const Trace& trace);

struct CompareRow {
  std::string algorithm;
  double final_f = 0.0;
  double final_grad_norm = 0.0;
  std::optional<long> first_below;
  double smoothness = 0.0;
};

struct CompareTable {
  double threshold = 0.0;
  std::vector<CompareRow> rows;
};

/// Threshold defaults to the best final f plus 1e-6 max(1, |best|).
CompareTable cli_compare(const ExperimentConfig& cfg);
std::string format_table(const CompareTable& table);
std::string compare_csv(const CompareTable& table);

/// Critical points found from the interior lattice of resolution `grid`.
std::vector<CriticalPointEntry> catalog(const Objective& obj, int grid);

/// Nearest catalogued point in max-norm; returns the index or -1 for an empty catalog.
long nearest_entry(const std::vector<CriticalPointEntry>& entries, const ProductPoint& p, double* distance = nullptr);

struct AvoidanceTrial {
  long trial = 0;
  std::size_t saddle = 0;  ///< catalog index of the saddle sampled around
  Vector start;
  Vector final_point;
  double final_grad_norm = 0.0;
  long nearest = -1;
  double nearest_distance = 0.0;
  double nearest_lambda_min = 0.0;
  std::string outcome;  ///< saddle, min, other, nonconverged
  std::string error;    ///< set when the run failed
};

struct AvoidanceReport {
  long trials = 0;
  long converged_to_saddle = 0;
  long converged_to_min = 0;
  long converged_to_other = 0;  ///< maxima and degenerate points
  long nonconverged = 0;
  std::vector<CriticalPointEntry> catalog;
  std::vector<AvoidanceTrial> per_trial;
};

/// Starts are x* + B xi with xi uniform in the ball of the given radius and
/// B metric-orthonormal at x*, rejected unless interior; saddles are used in
/// turn. Trial k draws from its own generator seeded by (seed, k), so the
/// report does not depend on the thread count. Throws NoSaddleFound.
AvoidanceReport cli_avoidance(const ExperimentConfig& cfg);
nlohmann::json to_json(const AvoidanceReport& report, const ExperimentConfig& cfg);

struct SpectraRow {
  std::size_t index = 0;
  Vector point;
  double lambda_min = 0.0;        ///< Riemannian Hessian
  double chart_lambda_min = 0.0;  ///< step-chart curvature
  QuadraticFactor factor;
  double max_eig = 0.0;
  bool unstable = false;
  bool sufficient_inequality = false;
  bool c_positive = false;
  bool admissible = false;  ///< alpha below the step bound
  double jacobian_deviation = 0.0;
};

struct SpectraReport {
  Shape shape;
  std::vector<SpectraRow> rows;
  std::vector<std::string> warnings;
};

SpectraReport cli_spectra(const ExperimentConfig& cfg);
std::string spectra_csv(const SpectraReport& report);

struct EscapeResult {
  std::optional<std::size_t> saddle;  ///< catalog index of the encountered saddle
  double closest = 0.0;               ///< closest approach to it
  std::optional<long> entered;        ///< first t within the radius
  std::optional<long> escaped;        ///< first later t with grad_norm > factor * min-so-far
  double min_grad = 0.0;
};

/// The encountered saddle is the strict saddle the trajectory comes closest
/// to, provided it comes within `radius` (max-norm). The minimum of the
/// gradient norm is taken over iterates within the radius; escape is the first
/// later iteration whose gradient norm exceeds `factor` times the minimum so far.
EscapeResult escape_iteration(const Trace& trace, const std::vector<CriticalPointEntry>& entries, double radius,
                              double factor = 10.0);

}  // namespace amwu::harness
