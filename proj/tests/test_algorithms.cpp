#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "amwu/algorithms.hpp"
#include "amwu/errors.hpp"

using namespace amwu;

namespace {

double simplex_violation(const ProductPoint& p) {
  double worst = 0.0;
  for (const auto& b : p.blocks()) {
    worst = std::max(worst, std::abs(b.weights().sum() - 1.0));
    if (!(b.weights().minCoeff() > 0.0)) return std::numeric_limits<double>::infinity();
  }
  return worst;
}

const std::vector<CriticalPointEntry>& trig1_catalog() {
  static const auto entries = [] {
    const auto obj = corpus_objective("trig1");
    return find_critical_points(obj, simplex_grid(obj.shape(), 24)).entries;
  }();
  return entries;
}

// Independent transcription of one exp/log step on a single simplex.
struct Plain {
  Vector x, v, y;
};

Plain plain_ragd(const Vector& x, const Vector& v, const Objective& obj, const StepCoefficients& c) {
  Vector y = (x.array() * (v.array() / x.array()).pow(c.theta)).matrix();
  y /= y.sum();
  const Vector g = obj.gradient(y);
  const Vector gm = (y.array() * (g.array() - y.dot(g))).matrix();
  Vector xn = (y.array() * (-c.alpha * gm.array()).exp()).matrix();
  xn /= xn.sum();
  Vector vn = (y.array() * (v.array() / y.array()).pow(c.zeta) * (-(c.s / c.gamma_bar) * gm.array()).exp()).matrix();
  vn /= vn.sum();
  return {xn, vn, y};
}

}  // namespace

TEST_CASE("mwu step") {
  const auto lin = linear_objective((Vector(2) << 1.0, 0.0).finished(), Shape{2});
  const auto m = mwu_step(ProductPoint(SimplexPoint{0.5, 0.5}), lin, 0.1);
  CHECK(m.block(0)[0] == doctest::Approx(0.47368421052631576).epsilon(1e-12));

  const auto lin2 = linear_objective((Vector(4) << 1.0, 0.0, 1.0, 0.0).finished(), Shape{2, 2});
  const auto m2 = mwu_step(ProductPoint({SimplexPoint{0.5, 0.5}, SimplexPoint{0.5, 0.5}}), lin2, 0.1);
  CHECK(m2.block(0).weights() == m.block(0).weights());
  CHECK(m2.block(1).weights() == m.block(0).weights());

  const auto flat = linear_objective(Vector::Constant(3, 2.0), Shape{3});
  const ProductPoint x(SimplexPoint{0.2, 0.3, 0.5});
  CHECK(max_abs_difference(mwu_step(x, flat, 0.1), x) < 1e-15);
}

TEST_CASE("critical points are fixed points of both modes") {
  const auto obj = corpus_objective("trig1");
  const ScheduleParams p{0.005, 0.1, 0.2};
  for (const auto& e : trig1_catalog()) {
    for (AmwuMode mode : {AmwuMode::ragd, AmwuMode::literal}) {
      const auto s0 = make_state(e.point, std::nullopt, {p});
      const auto s1 = amwu_step(s0, obj, p, mode);
      CHECK(max_abs_difference(s1.x, e.point) < 1e-14);
      CHECK(max_abs_difference(s1.v, e.point) < 1e-14);
    }
  }
}

TEST_CASE("ragd step matches a straight-line transcription") {
  const auto obj = corpus_objective("rosenbrock");
  const ScheduleParams p{0.01, 0.001, 1.0};
  auto st = make_state(ProductPoint(SimplexPoint{0.2, 0.4, 0.4}), std::nullopt, {p});
  Plain plain{st.x.flatten(), st.v.flatten(), st.x.flatten()};
  const double f0 = obj.value(st.x);
  for (int t = 0; t < 5; ++t) {
    const auto c = coefficients(p, st.schedules[0]);
    plain = plain_ragd(plain.x, plain.v, obj, c);
    st = amwu_step(st, obj, p, AmwuMode::ragd);
    CHECK((st.x.flatten() - plain.x).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((st.v.flatten() - plain.v).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((st.y.flatten() - plain.y).cwiseAbs().maxCoeff() < 1e-14);
  }
  CHECK(obj.value(st.x) < f0);
}

TEST_CASE("literal and ragd modes share y and agree to first order in x") {
  const auto obj = corpus_objective("trig1");
  const ProductPoint x(SimplexPoint{0.3, 0.3, 0.4});
  const ProductPoint v(SimplexPoint{0.25, 0.35, 0.4});
  auto gap = [&](double alpha) {
    const ScheduleParams p{alpha, 0.1, 0.2};
    const auto s0 = make_state(x, v, {p});
    const auto a = amwu_step(s0, obj, p, AmwuMode::ragd);
    const auto b = amwu_step(s0, obj, p, AmwuMode::literal);
    CHECK(max_abs_difference(a.y, b.y) < 1e-15);
    return max_abs_difference(a.x, b.x);
  };
  const double r = gap(1e-3) / gap(1e-4);
  CHECK(r > 5.0);
  CHECK(r < 20.0);
}

TEST_CASE("uncorrected literal pseudocode") {
  const auto obj = corpus_objective("rosenbrock");
  const ScheduleParams p{0.01, 0.001, 1.0};
  LiteralOptions raw;
  raw.log_normalizer_from_v = false;
  const auto s0 = make_state(ProductPoint(SimplexPoint{0.2, 0.4, 0.4}), ProductPoint(SimplexPoint{0.3, 0.3, 0.4}), {p});
  const auto a = amwu_step(s0, obj, p, AmwuMode::literal);
  const auto b = amwu_step(s0, obj, p, AmwuMode::literal, raw);
  // The normalizer is a common factor removed by renormalization.
  CHECK(max_abs_difference(a.y, b.y) < 1e-15);

  raw.weighted_denominator = false;
  const auto c = amwu_step(s0, obj, p, AmwuMode::literal, raw);
  CHECK(simplex_violation(c.x) < 1e-12);
}

TEST_CASE("multi-agent step") {
  const auto obj = corpus_objective("rosenbrock");
  const ScheduleParams p{0.01, 0.001, 1.0};
  auto a = make_state(ProductPoint(SimplexPoint{0.2, 0.4, 0.4}), std::nullopt, {p});
  auto b = a;
  for (int t = 0; t < 50; ++t) {
    a = amwu_step(a, obj, p, AmwuMode::ragd);
    b = multi_agent_amwu_step(b, obj, {p}, AmwuMode::ragd);
    CHECK(a.x.flatten() == b.x.flatten());
    CHECK(a.v.flatten() == b.v.flatten());
  }

  const auto two = corpus_objective("two_agent");
  const auto set = paper_setting("two_agent");
  const std::vector<ScheduleParams> per{set.params, ScheduleParams{0.002, 0.2, 0.3}};
  auto s = make_state(set.x0, std::nullopt, per);
  for (int t = 0; t < 10000; ++t) {
    s = multi_agent_amwu_step(s, two, per, AmwuMode::literal);
    REQUIRE(simplex_violation(s.x) < 1e-12);
    REQUIRE(simplex_violation(s.v) < 1e-12);
    REQUIRE(simplex_violation(s.y) < 1e-12);
  }
  CHECK(s.schedules[0].gamma != s.schedules[1].gamma);
  CHECK_THROWS_AS(multi_agent_amwu_step(s, two, {p, p, p}, AmwuMode::ragd), DimensionMismatch);
}

TEST_CASE("accelerated mirror descent") {
  const auto zero = linear_objective(Vector::Zero(3), Shape{3});
  const ProductPoint x0(SimplexPoint{0.2, 0.3, 0.5});
  auto st = make_amd_state(x0);
  for (int k = 0; k < 20; ++k) st = amd_step(st, zero, 3.0, 0.01);
  CHECK((amd_mirror_weights(st) - x0.flatten()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(max_abs_difference(st.x_tilde, x0) < 1e-15);

  const auto obj = corpus_objective("rosenbrock");
  const auto s1 = amd_step(make_amd_state(x0), obj, 3.0, 0.01);
  CHECK(max_abs_difference(s1.x, x0) < 1e-15);
  CHECK_THROWS_AS(amd_step(make_amd_state(x0), obj, 0.5, 0.01), InvalidArgument);
}

TEST_CASE("run loop") {
  const auto obj = corpus_objective("rosenbrock");
  const auto set = paper_setting("rosenbrock");
  AlgorithmSpec mwu{AlgorithmKind::mwu, {set.params}};

  RunConfig zero;
  zero.max_iters = 0;
  CHECK(run(mwu, obj, set.x0, std::nullopt, zero).records.size() == 1);

  RunConfig inf;
  inf.grad_tol = std::numeric_limits<double>::infinity();
  const auto tr = run(mwu, obj, set.x0, std::nullopt, inf);
  CHECK(tr.records.size() == 1);
  CHECK(tr.stopped_by_tolerance);

  RunConfig full;
  full.max_iters = set.iterations;
  const auto m = run(mwu, obj, set.x0, std::nullopt, full);
  CHECK(m.records.size() == static_cast<std::size_t>(set.iterations + 1));
  for (std::size_t i = 11; i < m.records.size(); ++i) CHECK(m.records[i].f_value < m.records[i - 1].f_value);

  RunConfig sparse = full;
  sparse.trace_every = 300;
  const auto sp = run(mwu, obj, set.x0, std::nullopt, sparse);
  CHECK(sp.records.back().t == set.iterations);
  CHECK(sp.records.size() == 8);
  for (std::size_t i = 1; i < sp.records.size(); ++i) CHECK(sp.records[i].t > sp.records[i - 1].t);

  AlgorithmSpec acc{AlgorithmKind::amwu_ragd, {set.params}};
  const auto a1 = run(acc, obj, set.x0, std::nullopt, full);
  const auto a2 = run(acc, obj, set.x0, std::nullopt, full);
  REQUIRE(a1.records.size() == a2.records.size());
  for (std::size_t i = 0; i < a1.records.size(); ++i) {
    CHECK(a1.records[i].f_value == a2.records[i].f_value);
    CHECK(a1.records[i].grad_norm == a2.records[i].grad_norm);
  }
  CHECK_FALSE(a1.warnings.empty());
}

TEST_CASE("step failures carry the iteration index") {
  const auto lin = linear_objective((Vector(2) << 30.0, 0.0).finished(), Shape{2});
  AlgorithmSpec mwu{AlgorithmKind::mwu, {ScheduleParams{0.1, 0.1, 0.5}}};
  RunConfig cfg;
  cfg.max_iters = 5;
  try {
    run(mwu, lin, ProductPoint(SimplexPoint{0.5, 0.5}), std::nullopt, cfg);
    FAIL("expected a failure");
  } catch (const RunError& e) {
    CHECK(e.iteration() == 0);
    CHECK_THROWS_AS(std::rethrow_if_nested(e), StepTooLarge);
  }
}

TEST_CASE("long runs keep every point on the simplex and MWU descends") {
  for (const auto& name : corpus_names()) {
    CAPTURE(name);
    const auto obj = corpus_objective(name);
    const auto set = paper_setting(name);
    RunConfig cfg;
    cfg.max_iters = 10000;
    for (AlgorithmKind kind : {AlgorithmKind::mwu, AlgorithmKind::amwu_literal, AlgorithmKind::amwu_ragd,
                               AlgorithmKind::amd}) {
      const auto tr = run(AlgorithmSpec{kind, {set.params}}, obj, set.x0, std::nullopt, cfg);
      double worst = 0.0;
      for (const auto& r : tr.records) {
        worst = std::max({worst, simplex_violation(*r.x), simplex_violation(*r.y)});
        if (r.v) worst = std::max(worst, simplex_violation(*r.v));
      }
      CHECK(worst < 1e-12);
      if (kind == AlgorithmKind::mwu) {
        std::size_t ok = 0;
        for (std::size_t i = 1; i < tr.records.size(); ++i) {
          if (tr.records[i].f_value <= tr.records[i - 1].f_value + 1e-12) ++ok;
        }
        CHECK(static_cast<double>(ok) >= 0.99 * static_cast<double>(tr.records.size() - 1));
      }
    }
  }
}
