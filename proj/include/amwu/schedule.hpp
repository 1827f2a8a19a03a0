#pragma once

// Acceleration schedule: the per-step root s_t, the gamma recursion, the
// stationary values and the admissible step bound.

#include <limits>
#include <optional>

namespace amwu {

struct ScheduleParams {
  double alpha = 0.01;  ///< step size
  double beta = 0.1;
  double mu = 1.0;      ///< geodesic convexity estimate
  double lipschitz = std::numeric_limits<double>::infinity();
};

/// Throws InvalidArgument unless alpha, beta, mu > 0 and L > 0.
void validate(const ScheduleParams& params);

/// True when alpha < 1/L (always true for L = infinity).
bool below_lipschitz_bound(const ScheduleParams& params);

struct ScheduleState {
  double s = 0.0;          ///< root of s^2 = alpha((1-s)gamma + s mu)
  double gamma = 0.0;
  double gamma_bar = 0.0;  ///< (1-s)gamma + s mu, used by this step's v-update
  long t = 0;
};

/// Mixing coefficients of one accelerated step.
struct StepCoefficients {
  double alpha = 0.0;
  double mu = 0.0;
  double s = 0.0;
  double gamma = 0.0;
  double gamma_bar = 0.0;
  double theta = 0.0;  ///< s gamma / (gamma + s mu)
  double zeta = 0.0;   ///< (1-s) gamma / gamma_bar
};

/// Positive root of s^2 + alpha(gamma - mu)s - alpha gamma = 0, computed with
/// the cancellation-free form. Throws NoRootInUnitInterval when the root >= 1.
double solve_s(const ScheduleParams& params, double gamma);

/// |s^2 - alpha((1-s)gamma + s mu)|
double schedule_residual(const ScheduleParams& params, double s, double gamma);

/// State at t = 0; gamma_0 defaults to mu.
ScheduleState initial_schedule(const ScheduleParams& params, std::optional<double> gamma0 = std::nullopt);

/// gamma_{t+1} = gamma_bar / (1 + beta), then a fresh s against gamma_{t+1}.
ScheduleState advance(const ScheduleParams& params, const ScheduleState& state);

StepCoefficients coefficients(const ScheduleParams& params, const ScheduleState& state);

struct StationaryValues {
  double s = 0.0;
  double gamma = 0.0;
};

/// Fixed point of the recursion: s* = (sqrt(beta^2 + 4(1+beta)mu alpha) - beta)/2
/// and gamma* = s* mu / (s* + beta).
StationaryValues stationary_values(const ScheduleParams& params);

/// The printed closed form gamma = (r - beta)/(r + beta), r = sqrt(beta^2 + 4(1+beta)mu alpha),
/// with the same s*. Agrees with stationary_values only for mu = 1.
StationaryValues appendix_closed_form(const ScheduleParams& params);

/// Coefficients at the fixed point (gamma_bar = (1+beta)gamma* there).
StepCoefficients stationary_coefficients(const ScheduleParams& params);

/// Coefficients from appendix_closed_form with gamma_bar = (1+beta)gamma and
/// zeta = (1-s)/(1+beta).
StepCoefficients appendix_coefficients(const ScheduleParams& params);

struct StepBound {
  double bound = 0.0;
  bool mu_warning = false;  ///< mu >= 1, outside the derivation's assumption
};

/// min(1/L, (1 + (mu+1)beta) / ((1+beta)mu))
StepBound admissible_step_bound(double beta, double mu, double lipschitz = std::numeric_limits<double>::infinity());

/// 0.2 sqrt(mu / L)
double recommended_beta(double mu, double lipschitz);

}  // namespace amwu
