#include "amwu/algorithms.hpp"

#include <cmath>
#include <exception>
#include <memory>
#include <sstream>

#include "amwu/errors.hpp"

namespace amwu {

const char* to_string(AmwuMode mode) { return mode == AmwuMode::literal ? "literal" : "ragd"; }

namespace {

std::vector<ScheduleParams> broadcast(const std::vector<ScheduleParams>& params, std::size_t blocks) {
  if (params.empty()) throw InvalidArgument("no schedule parameters given");
  if (params.size() == blocks) return params;
  if (params.size() == 1) return std::vector<ScheduleParams>(blocks, params.front());
  std::ostringstream os;
  os << "got " << params.size() << " parameter sets for " << blocks << " blocks";
  throw DimensionMismatch(os.str());
}

void check_same_shape(const ProductPoint& a, const ProductPoint& b, const char* what) {
  if (a.shape() != b.shape()) throw DimensionMismatch(std::string(what) + ": points have different shapes");
}

Vector block_of(const Vector& joint, Index offset, Index dim) { return joint.segment(offset, dim); }

Vector log_ratio(const SimplexPoint& a, const SimplexPoint& b) {
  return a.weights().array().log() - b.weights().array().log();
}

}  // namespace

OptimizerState make_state(const ProductPoint& x0, const std::optional<ProductPoint>& v0,
                          const std::vector<ScheduleParams>& params, std::optional<double> gamma0) {
  const ProductPoint v = v0.value_or(x0);
  check_same_shape(x0, v, "make_state");
  const auto per_block = broadcast(params, x0.num_blocks());
  std::vector<ScheduleState> schedules;
  schedules.reserve(per_block.size());
  for (const auto& p : per_block) schedules.push_back(initial_schedule(p, gamma0));
  return OptimizerState{x0, v, x0, std::move(schedules), 0, 0.0};
}

AcceleratedUpdate ragd_update(const ProductPoint& x, const ProductPoint& v, const Objective& obj,
                              const std::vector<StepCoefficients>& coeffs) {
  check_same_shape(x, v, "ragd_update");
  const std::size_t n = x.num_blocks();
  if (coeffs.size() != n) throw DimensionMismatch("ragd_update: one coefficient set per block required");

  std::vector<SimplexPoint> y;
  y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    y.push_back(exp_map(x.block(i), coeffs[i].theta * log_map(x.block(i), v.block(i))));
  }
  ProductPoint yp(y);
  const Vector g = obj.gradient(yp);
  const auto offsets = block_offsets(yp.shape());

  std::vector<SimplexPoint> xn, vn;
  xn.reserve(n);
  vn.reserve(n);
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = coeffs[i];
    const TangentVector gm = shahshahani_gradient(y[i], block_of(g, offsets[i], y[i].dim()));
    const double nrm = shahshahani_norm(y[i], gm.components());
    sq += nrm * nrm;
    xn.push_back(exp_map(y[i], -c.alpha * gm));
    vn.push_back(exp_map(y[i], c.zeta * log_map(y[i], v.block(i)) - (c.s / c.gamma_bar) * gm));
  }
  return AcceleratedUpdate{std::move(yp), ProductPoint(std::move(xn)), ProductPoint(std::move(vn)), std::sqrt(sq)};
}

AcceleratedUpdate literal_update(const ProductPoint& x, const ProductPoint& v, const ProductPoint& y_prev,
                                 const Objective& obj, const std::vector<StepCoefficients>& coeffs,
                                 const LiteralOptions& options) {
  check_same_shape(x, v, "literal_update");
  check_same_shape(x, y_prev, "literal_update");
  const std::size_t n = x.num_blocks();
  if (coeffs.size() != n) throw DimensionMismatch("literal_update: one coefficient set per block required");

  std::vector<SimplexPoint> y;
  y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SimplexPoint& xi = x.block(i);
    const SimplexPoint& ref = options.log_normalizer_from_v ? v.block(i) : y_prev.block(i);
    const double ln_s = log_ratio(xi, ref).mean();
    const Vector e = coeffs[i].theta * (ln_s + log_ratio(v.block(i), xi).array()).matrix();
    y.push_back(softmax_reweight(xi, e));
  }
  ProductPoint yp(y);
  const Vector g = obj.gradient(yp);
  const auto offsets = block_offsets(yp.shape());

  std::vector<SimplexPoint> xn, vn;
  xn.reserve(n);
  vn.reserve(n);
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = coeffs[i];
    const SimplexPoint& yi = y[i];
    const Vector gi = block_of(g, offsets[i], yi.dim());
    const double nrm = shahshahani_norm(yi, shahshahani_gradient(yi, gi).components());
    sq += nrm * nrm;

    if (options.weighted_denominator) {
      xn.push_back(mwu_retract(yi, gi, c.alpha));
    } else {
      const double den = 1.0 - c.alpha * gi.sum();
      const Vector num = (1.0 - c.alpha * gi.array()).matrix();
      if (!(den > 0.0) || !(num.minCoeff() > 0.0)) {
        throw StepTooLarge("literal_update: unweighted MWU factor is not positive");
      }
      xn.push_back(SimplexPoint::normalized(yi.weights().cwiseProduct(num) / den));
    }

    const double ln_s_prime = log_ratio(yi, v.block(i)).mean();
    const Vector u = c.zeta * (ln_s_prime + log_ratio(v.block(i), yi).array()).matrix() +
                     projected_displacement(yi, gi, c.alpha);
    vn.push_back(softmax_reweight(yi, u));
  }
  return AcceleratedUpdate{std::move(yp), ProductPoint(std::move(xn)), ProductPoint(std::move(vn)), std::sqrt(sq)};
}

ProductPoint mwu_step(const ProductPoint& x, const Objective& obj, double alpha) {
  return product_mwu_retract(x, obj.gradient(x), alpha);
}

OptimizerState multi_agent_amwu_step(const OptimizerState& state, const Objective& obj,
                                     const std::vector<ScheduleParams>& per_agent, AmwuMode mode,
                                     const LiteralOptions& options) {
  const std::size_t n = state.x.num_blocks();
  const auto params = broadcast(per_agent, n);
  if (state.schedules.size() != n) throw DimensionMismatch("state carries the wrong number of schedules");

  std::vector<StepCoefficients> coeffs;
  coeffs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) coeffs.push_back(coefficients(params[i], state.schedules[i]));

  AcceleratedUpdate up = mode == AmwuMode::ragd ? ragd_update(state.x, state.v, obj, coeffs)
                                                : literal_update(state.x, state.v, state.y, obj, coeffs, options);

  std::vector<ScheduleState> schedules;
  schedules.reserve(n);
  for (std::size_t i = 0; i < n; ++i) schedules.push_back(advance(params[i], state.schedules[i]));
  return OptimizerState{std::move(up.x_next), std::move(up.v_next), std::move(up.y), std::move(schedules),
                        state.t + 1, up.grad_norm};
}

OptimizerState amwu_step(const OptimizerState& state, const Objective& obj, const ScheduleParams& params,
                         AmwuMode mode, const LiteralOptions& options) {
  return multi_agent_amwu_step(state, obj, {params}, mode, options);
}

AmdState make_amd_state(const ProductPoint& x0) {
  return AmdState{x0, Vector(x0.flatten().array().log()), x0, 0, 0.0};
}

Vector amd_mirror_weights(const AmdState& state) {
  const Shape shape = state.x.shape();
  const auto offsets = block_offsets(shape);
  Vector w(state.z_log.size());
  for (std::size_t i = 0; i < shape.size(); ++i) {
    const Vector l = state.z_log.segment(offsets[i], shape[i]);
    const Vector e = (l.array() - l.maxCoeff()).exp().matrix();
    w.segment(offsets[i], shape[i]) = e / e.sum();
  }
  return w;
}

bool amd_mirror_on_boundary(const AmdState& state) { return !(amd_mirror_weights(state).minCoeff() > 0.0); }

AmdState amd_step(const AmdState& state, const Objective& obj, double r, double step) {
  if (!(r >= 1.0)) throw InvalidArgument("amd_step: r must be at least 1");
  if (!(step > 0.0)) throw InvalidArgument("amd_step: step must be positive");
  const double k = static_cast<double>(state.k);
  const double lambda = r / (r + k);
  const Shape shape = state.x.shape();
  const auto offsets = block_offsets(shape);
  const Vector z = amd_mirror_weights(state);

  std::vector<SimplexPoint> xq;
  xq.reserve(shape.size());
  for (std::size_t i = 0; i < shape.size(); ++i) {
    const Vector w = lambda * z.segment(offsets[i], shape[i]) + (1.0 - lambda) * state.x_tilde.block(i).weights();
    xq.push_back(SimplexPoint::normalized(w));
  }
  ProductPoint xn(std::move(xq));
  const Vector g = obj.gradient(xn);

  Vector zl = state.z_log - (k * step / r) * g;
  double sq = 0.0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    auto seg = zl.segment(offsets[i], shape[i]);
    seg.array() -= seg.maxCoeff();
    const Vector gi = g.segment(offsets[i], shape[i]);
    const double nrm = shahshahani_norm(xn.block(i), shahshahani_gradient(xn.block(i), gi).components());
    sq += nrm * nrm;
  }
  if (!zl.allFinite()) throw BoundaryReached("amd_step: mirror log weights are not finite");
  ProductPoint xt = product_mwu_retract(xn, g, step);
  return AmdState{std::move(xn), std::move(zl), std::move(xt), state.k + 1, std::sqrt(sq)};
}

std::string AlgorithmSpec::label() const {
  switch (kind) {
    case AlgorithmKind::mwu:
      return "mwu";
    case AlgorithmKind::amwu_literal:
      return "amwu_literal";
    case AlgorithmKind::amwu_ragd:
      return "amwu_ragd";
    case AlgorithmKind::amd: {
      std::ostringstream os;
      os << "amd:" << r;
      return os.str();
    }
  }
  return "unknown";
}

namespace {

// One uniform view over the three state types: the point reported at t, the
// evaluation point and the auxiliary sequence, plus a step function.
struct Stepper {
  virtual ~Stepper() = default;
  virtual const ProductPoint& x() const = 0;
  virtual const ProductPoint& y() const = 0;
  virtual const ProductPoint* v() const = 0;
  virtual void note(Trace&) const {}
  virtual std::vector<ScheduleState> schedules() const { return {}; }
  // Computes the step leaving t; returns the gradient norm at its evaluation point.
  virtual double prepare(const Objective& obj) = 0;
  virtual void commit() = 0;
};

struct MwuStepper final : Stepper {
  ProductPoint cur, next;
  double alpha;
  MwuStepper(const ProductPoint& x0, double a) : cur(x0), next(x0), alpha(a) {}
  const ProductPoint& x() const override { return cur; }
  const ProductPoint& y() const override { return cur; }
  const ProductPoint* v() const override { return &cur; }
  double prepare(const Objective& obj) override {
    const Vector g = obj.gradient(cur);
    next = product_mwu_retract(cur, g, alpha);
    return product_norm(cur, product_gradient(cur, g));
  }
  void commit() override { cur = next; }
};

struct AmwuStepper final : Stepper {
  OptimizerState cur;
  std::optional<OptimizerState> next;
  std::vector<ScheduleParams> params;
  AmwuMode mode;
  LiteralOptions literal;
  AmwuStepper(OptimizerState s, std::vector<ScheduleParams> p, AmwuMode m, LiteralOptions o)
      : cur(std::move(s)), params(std::move(p)), mode(m), literal(o) {}
  const ProductPoint& x() const override { return cur.x; }
  const ProductPoint& y() const override { return next ? next->y : cur.y; }
  const ProductPoint* v() const override { return &cur.v; }
  std::vector<ScheduleState> schedules() const override { return cur.schedules; }
  double prepare(const Objective& obj) override {
    next = multi_agent_amwu_step(cur, obj, params, mode, literal);
    return next->grad_norm;
  }
  void commit() override {
    cur = std::move(*next);
    next.reset();
  }
};

struct AmdStepper final : Stepper {
  AmdState cur;
  std::optional<AmdState> next;
  double r, step;
  AmdStepper(const ProductPoint& x0, double rr, double st) : cur(make_amd_state(x0)), r(rr), step(st) {}
  const ProductPoint& x() const override { return cur.x; }
  const ProductPoint& y() const override { return next ? next->x : cur.x; }
  const ProductPoint* v() const override { return nullptr; }
  double prepare(const Objective& obj) override {
    next = amd_step(cur, obj, r, step);
    return next->grad_norm;
  }
  void commit() override {
    cur = std::move(*next);
    next.reset();
  }
  void note(Trace& trace) const override {
    if (!warned && amd_mirror_on_boundary(cur)) {
      std::ostringstream os;
      os << "A-MD mirror iterate reached the boundary in floating point at k=" << cur.k;
      trace.warnings.push_back(os.str());
      warned = true;
    }
  }
  mutable bool warned = false;
};

}  // namespace

Trace run(const AlgorithmSpec& algorithm, const Objective& obj, const ProductPoint& x0,
          const std::optional<ProductPoint>& v0, const RunConfig& config) {
  if (config.max_iters < 0) throw InvalidArgument("run: max_iters must be non-negative");
  if (!(config.grad_tol >= 0.0)) throw InvalidArgument("run: grad_tol must be non-negative");
  if (config.trace_every < 1) throw InvalidArgument("run: trace_every must be at least 1");
  if (x0.shape() != obj.shape()) throw DimensionMismatch("run: starting point does not match the objective");
  if (algorithm.params.empty()) throw InvalidArgument("run: no step parameters");

  Trace trace{algorithm.label(), {}, {}, false, x0, x0};
  const double alpha = algorithm.params.front().alpha;

  std::unique_ptr<Stepper> stepper;
  switch (algorithm.kind) {
    case AlgorithmKind::mwu:
      if (!(alpha > 0.0)) throw InvalidArgument("run: alpha must be positive");
      stepper = std::make_unique<MwuStepper>(x0, alpha);
      break;
    case AlgorithmKind::amd:
      if (algorithm.r < 3.0) trace.warnings.push_back("A-MD with r < 3");
      stepper = std::make_unique<AmdStepper>(x0, algorithm.r, alpha);
      break;
    case AlgorithmKind::amwu_literal:
    case AlgorithmKind::amwu_ragd: {
      const auto params = broadcast(algorithm.params, x0.num_blocks());
      for (const auto& p : params) {
        if (admissible_step_bound(p.beta, p.mu, p.lipschitz).mu_warning) {
          trace.warnings.push_back("mu >= 1: step bound derived for mu < 1");
          break;
        }
      }
      const AmwuMode mode = algorithm.kind == AlgorithmKind::amwu_ragd ? AmwuMode::ragd : AmwuMode::literal;
      stepper = std::make_unique<AmwuStepper>(make_state(x0, v0, params, algorithm.gamma0), params, mode,
                                              algorithm.literal);
      break;
    }
  }

  for (long t = 0;; ++t) {
    double gn = 0.0;
    try {
      gn = stepper->prepare(obj);
    } catch (...) {
      std::throw_with_nested(RunError(t, trace.label + " step failed"));
    }
    const bool stop_tol = gn <= config.grad_tol;
    const bool last = stop_tol || t >= config.max_iters;
    if (t % config.trace_every == 0 || last) {
      TraceRecord rec;
      rec.t = t;
      rec.f_value = obj.value(stepper->x());
      rec.grad_norm = gn;
      if (config.keep_points) {
        rec.x = stepper->x();
        rec.y = stepper->y();
        if (const auto* v = stepper->v()) rec.v = *v;
      }
      rec.schedules = stepper->schedules();
      trace.records.push_back(std::move(rec));
    }
    if (last) {
      trace.stopped_by_tolerance = stop_tol;
      trace.final_x = stepper->x();
      trace.final_y = stepper->y();
      break;
    }
    stepper->commit();
    stepper->note(trace);
  }
  return trace;
}

}  // namespace amwu
