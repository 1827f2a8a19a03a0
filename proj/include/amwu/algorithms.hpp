#pragma once

// Optimizers on products of simplices: classic MWU, accelerated MWU (literal
// pseudocode arithmetic or the exp/log composition), its multi-agent form and
// an entropic accelerated mirror descent baseline.

#include <optional>
#include <string>
#include <vector>

#include "amwu/geometry.hpp"
#include "amwu/objectives.hpp"
#include "amwu/schedule.hpp"

namespace amwu {

enum class AmwuMode { literal, ragd };

const char* to_string(AmwuMode mode);

/// Corrections applied to the literal pseudocode. Both default to on.
struct LiteralOptions {
  /// Normalizer of the y-update log ratio from (x, v) rather than (x, previous y).
  bool log_normalizer_from_v = true;
  /// MWU x-update denominator 1 - alpha sum_j y_j g_j rather than 1 - alpha sum_j g_j.
  bool weighted_denominator = true;
};

struct OptimizerState {
  ProductPoint x;
  ProductPoint v;
  ProductPoint y;                        ///< last intermediate point (x at t = 0)
  std::vector<ScheduleState> schedules;  ///< one per block
  long t = 0;
  double grad_norm = 0.0;  ///< Shahshahani norm of grad f at the last y
};

/// v0 defaults to x0. Each block gets its own schedule; `params` holds either
/// one entry (shared by every block) or one per block.
OptimizerState make_state(const ProductPoint& x0, const std::optional<ProductPoint>& v0,
                          const std::vector<ScheduleParams>& params, std::optional<double> gamma0 = std::nullopt);

/// Points produced by one accelerated step.
struct AcceleratedUpdate {
  ProductPoint y;
  ProductPoint x_next;
  ProductPoint v_next;
  double grad_norm = 0.0;
};

/// y = Exp_x(theta Log_x v); x+ = Exp_y(-alpha grad f(y));
/// v+ = Exp_y(zeta Log_y v - (s / gamma_bar) grad f(y)), block by block with
/// one gradient evaluation at the joint y.
AcceleratedUpdate ragd_update(const ProductPoint& x, const ProductPoint& v, const Objective& obj,
                              const std::vector<StepCoefficients>& coeffs);

/// The pseudocode arithmetic: softmax y-update, MWU x-update and
/// u_i = zeta ln(S' v_i / y_i) + (MWU(y)_i - y_i), v+ = y reweighted by e^u.
AcceleratedUpdate literal_update(const ProductPoint& x, const ProductPoint& v, const ProductPoint& y_prev,
                                 const Objective& obj, const std::vector<StepCoefficients>& coeffs,
                                 const LiteralOptions& options = {});

ProductPoint mwu_step(const ProductPoint& x, const Objective& obj, double alpha);

/// Single-agent A-MWU: one parameter set for every block.
OptimizerState amwu_step(const OptimizerState& state, const Objective& obj, const ScheduleParams& params,
                         AmwuMode mode, const LiteralOptions& options = {});

/// Per-agent parameters and schedules; gradients at the joint intermediate point.
OptimizerState multi_agent_amwu_step(const OptimizerState& state, const Objective& obj,
                                     const std::vector<ScheduleParams>& per_agent, AmwuMode mode,
                                     const LiteralOptions& options = {});

/// Accelerated mirror descent state: query point x, mirror iterate z and
/// primal MWU iterate x_tilde. The mirror iterate is held as per-block log
/// weights, since its entries decay like exp(-c k^2) and leave the range of
/// doubles long before the other two sequences do.
struct AmdState {
  ProductPoint x;
  Vector z_log;  ///< joint log weights of z, up to a per-block constant
  ProductPoint x_tilde;
  long k = 0;
  double grad_norm = 0.0;  ///< at the last query point
};

/// z as weights; entries may have underflowed to zero.
Vector amd_mirror_weights(const AmdState& state);
/// True when some entry of z is zero in floating point.
bool amd_mirror_on_boundary(const AmdState& state);

AmdState make_amd_state(const ProductPoint& x0);

/// lambda = r/(r+k); x+ = lambda z + (1-lambda) x_tilde;
/// z+ ~ z exp(-(k step / r) grad f(x+)); x_tilde+ = MWU(x+, step).
AmdState amd_step(const AmdState& state, const Objective& obj, double r, double step);

// ---------------------------------------------------------------------------

enum class AlgorithmKind { mwu, amwu_literal, amwu_ragd, amd };

struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::amwu_ragd;
  /// One entry shared by all blocks or one per block. MWU and A-MD use alpha
  /// of the first entry.
  std::vector<ScheduleParams> params;
  double r = 3.0;  ///< A-MD averaging parameter
  std::optional<double> gamma0;
  LiteralOptions literal;

  std::string label() const;
};

struct RunConfig {
  long max_iters = 1000;
  double grad_tol = 0.0;  ///< stop once the gradient norm is <= grad_tol
  long trace_every = 1;
  bool keep_points = true;  ///< store x, y, v snapshots in the trace
};

struct TraceRecord {
  long t = 0;
  double f_value = 0.0;    ///< f(x_t)
  double grad_norm = 0.0;  ///< at the point where step t evaluates the gradient
  std::optional<ProductPoint> x;
  std::optional<ProductPoint> y;
  std::optional<ProductPoint> v;  ///< v for A-MWU, x for MWU, unset for A-MD
  std::vector<ScheduleState> schedules;  ///< accelerated runs only
};

struct Trace {
  std::string label;
  std::vector<TraceRecord> records;
  std::vector<std::string> warnings;
  bool stopped_by_tolerance = false;
  ProductPoint final_x;
  ProductPoint final_y;
};

/// Records t = 0..T with T <= max_iters, every `trace_every` steps plus the
/// last one. Step failures are rethrown as RunError with the iteration index.
Trace run(const AlgorithmSpec& algorithm, const Objective& obj, const ProductPoint& x0,
          const std::optional<ProductPoint>& v0, const RunConfig& config);

}  // namespace amwu
