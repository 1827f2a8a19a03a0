#include "amwu/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "amwu/errors.hpp"

namespace amwu {

void validate(const ScheduleParams& p) {
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha)) throw InvalidArgument("schedule: alpha must be positive");
  if (!(p.beta > 0.0) || !std::isfinite(p.beta)) throw InvalidArgument("schedule: beta must be positive");
  if (!(p.mu > 0.0) || !std::isfinite(p.mu)) throw InvalidArgument("schedule: mu must be positive");
  if (!(p.lipschitz > 0.0)) throw InvalidArgument("schedule: Lipschitz constant must be positive");
}

bool below_lipschitz_bound(const ScheduleParams& p) { return p.alpha * p.lipschitz < 1.0; }

double solve_s(const ScheduleParams& p, double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("solve_s: gamma must be positive");
  // s^2 + b s + c = 0 with b = alpha(gamma - mu), c = -alpha gamma < 0: one
  // positive and one negative root.
  const double b = p.alpha * (gamma - p.mu);
  const double c = -p.alpha * gamma;
  const double disc = std::sqrt(b * b - 4.0 * c);
  double s = 0.0;
  if (b >= 0.0) {
    s = -2.0 * c / (b + disc);
  } else {
    s = (disc - b) / 2.0;
  }
  if (!(s < 1.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "solve_s: positive root " << s << " is not in (0, 1) (alpha=" << p.alpha << ", gamma=" << gamma
       << ", mu=" << p.mu << ")";
    throw NoRootInUnitInterval(os.str());
  }
  return s;
}

double schedule_residual(const ScheduleParams& p, double s, double gamma) {
  return std::abs(s * s - p.alpha * ((1.0 - s) * gamma + s * p.mu));
}

ScheduleState initial_schedule(const ScheduleParams& p, std::optional<double> gamma0) {
  validate(p);
  ScheduleState st;
  st.gamma = gamma0.value_or(p.mu);
  st.s = solve_s(p, st.gamma);
  st.gamma_bar = (1.0 - st.s) * st.gamma + st.s * p.mu;
  st.t = 0;
  return st;
}

ScheduleState advance(const ScheduleParams& p, const ScheduleState& st) {
  ScheduleState next;
  next.gamma = st.gamma_bar / (1.0 + p.beta);
  next.s = solve_s(p, next.gamma);
  next.gamma_bar = (1.0 - next.s) * next.gamma + next.s * p.mu;
  next.t = st.t + 1;
  return next;
}

namespace {

StepCoefficients make_coefficients(double alpha, double mu, double s, double gamma, double gamma_bar,
                                   double zeta) {
  StepCoefficients c;
  c.alpha = alpha;
  c.mu = mu;
  c.s = s;
  c.gamma = gamma;
  c.gamma_bar = gamma_bar;
  c.theta = s * gamma / (gamma + s * mu);
  c.zeta = zeta;
  return c;
}

double stationary_root(const ScheduleParams& p) {
  const double r = std::sqrt(p.beta * p.beta + 4.0 * (1.0 + p.beta) * p.mu * p.alpha);
  return (r - p.beta) / 2.0;
}

}  // namespace

StepCoefficients coefficients(const ScheduleParams& p, const ScheduleState& st) {
  return make_coefficients(p.alpha, p.mu, st.s, st.gamma, st.gamma_bar, (1.0 - st.s) * st.gamma / st.gamma_bar);
}

StationaryValues stationary_values(const ScheduleParams& p) {
  validate(p);
  StationaryValues v;
  v.s = stationary_root(p);
  v.gamma = v.s * p.mu / (v.s + p.beta);
  return v;
}

StationaryValues appendix_closed_form(const ScheduleParams& p) {
  validate(p);
  const double r = std::sqrt(p.beta * p.beta + 4.0 * (1.0 + p.beta) * p.mu * p.alpha);
  StationaryValues v;
  v.s = (r - p.beta) / 2.0;
  v.gamma = (r - p.beta) / (r + p.beta);
  return v;
}

StepCoefficients stationary_coefficients(const ScheduleParams& p) {
  const auto v = stationary_values(p);
  const double gamma_bar = (1.0 - v.s) * v.gamma + v.s * p.mu;
  return make_coefficients(p.alpha, p.mu, v.s, v.gamma, gamma_bar, (1.0 - v.s) * v.gamma / gamma_bar);
}

StepCoefficients appendix_coefficients(const ScheduleParams& p) {
  const auto v = appendix_closed_form(p);
  return make_coefficients(p.alpha, p.mu, v.s, v.gamma, (1.0 + p.beta) * v.gamma, (1.0 - v.s) / (1.0 + p.beta));
}

StepBound admissible_step_bound(double beta, double mu, double lipschitz) {
  if (!(beta > 0.0) || !(mu > 0.0) || !(lipschitz > 0.0)) {
    throw InvalidArgument("admissible_step_bound: beta, mu and L must be positive");
  }
  StepBound b;
  const double second = (1.0 + (mu + 1.0) * beta) / ((1.0 + beta) * mu);
  b.bound = std::isinf(lipschitz) ? second : std::min(1.0 / lipschitz, second);
  b.mu_warning = mu >= 1.0;
  return b;
}

double recommended_beta(double mu, double lipschitz) {
  if (!(mu > 0.0) || !(lipschitz > 0.0)) throw InvalidArgument("recommended_beta: mu and L must be positive");
  return 0.2 * std::sqrt(mu / lipschitz);
}

}  // namespace amwu
