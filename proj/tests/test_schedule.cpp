#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "amwu/errors.hpp"
#include "amwu/schedule.hpp"

using namespace amwu;

TEST_CASE("the root solves the defining quadratic") {
  for (double alpha : {1e-6, 1e-3, 0.01, 0.3}) {
    for (double gamma : {1e-8, 0.1, 1.0, 50.0}) {
      for (double mu : {1e-3, 0.2, 1.0}) {
        const ScheduleParams p{alpha, 0.1, mu};
        const double s = solve_s(p, gamma);
        CHECK(s > 0.0);
        CHECK(s < 1.0);
        CHECK(schedule_residual(p, s, gamma) < 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(solve_s(ScheduleParams{5.0, 0.1, 1.0}, 1.0), NoRootInUnitInterval);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate(ScheduleParams{0.0, 0.1, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(validate(ScheduleParams{0.01, -1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(validate(ScheduleParams{0.01, 0.1, 0.0}), InvalidArgument);
  CHECK(below_lipschitz_bound(ScheduleParams{0.01, 0.1, 1.0, 10.0}));
  CHECK_FALSE(below_lipschitz_bound(ScheduleParams{0.2, 0.1, 1.0, 10.0}));
}

TEST_CASE("recursion keeps gamma positive and the residual small") {
  const ScheduleParams p{0.005, 0.1, 0.2};
  auto st = initial_schedule(p);
  CHECK(st.gamma == 0.2);
  for (int t = 0; t < 10000; ++t) {
    CHECK(st.gamma > 0.0);
    CHECK(schedule_residual(p, st.s, st.gamma) < 1e-12);
    const auto c = coefficients(p, st);
    CHECK(c.theta > 0.0);
    CHECK(c.theta < 1.0);
    CHECK(c.zeta > 0.0);
    CHECK(c.zeta < 1.0);
    st = advance(p, st);
  }
  CHECK(st.t == 10000);
}

TEST_CASE("stationary values") {
  const ScheduleParams p{0.01, 0.1, 1.0};
  const auto sv = stationary_values(p);
  CHECK(sv.s == doctest::Approx(0.0661895).epsilon(1e-6));
  CHECK(sv.gamma == doctest::Approx(0.3982762).epsilon(1e-6));

  for (const ScheduleParams q : {p, ScheduleParams{0.01, 0.1, 0.2}, ScheduleParams{0.001, 0.5, 0.7}}) {
    const auto f = stationary_values(q);
    CHECK(std::abs(solve_s(q, f.gamma) - f.s) < 1e-10);
    ScheduleState st{f.s, f.gamma, (1.0 - f.s) * f.gamma + f.s * q.mu, 0};
    CHECK(std::abs(advance(q, st).gamma - f.gamma) < 1e-10);
  }

  const ScheduleParams q{0.01, 0.1, 0.2};
  CHECK(stationary_values(q).s == doctest::Approx(0.0185566).epsilon(1e-6));
  CHECK(appendix_closed_form(q).gamma == doctest::Approx(0.1565208).epsilon(1e-6));
  CHECK(stationary_values(q).gamma == doctest::Approx(0.0313041).epsilon(1e-5));
  CHECK(std::abs(appendix_closed_form(p).gamma - stationary_values(p).gamma) < 1e-14);

  CHECK(stationary_values(ScheduleParams{0.01, 100.0, 1.0}).s < stationary_values(ScheduleParams{0.01, 1.0, 1.0}).s);
}

TEST_CASE("step bound and recommended beta") {
  const auto b = admissible_step_bound(0.1, 0.5, 10.0);
  CHECK(b.bound == doctest::Approx(0.1));
  CHECK_FALSE(b.mu_warning);
  CHECK(admissible_step_bound(0.1, 0.5).bound == doctest::Approx(2.0909090909090909).epsilon(1e-12));
  CHECK(admissible_step_bound(0.1, 1.0).mu_warning);
  CHECK(recommended_beta(1.0, 25.0) == doctest::Approx(0.04));
  CHECK(recommended_beta(2.0, 2.0) == doctest::Approx(0.2));
  CHECK(recommended_beta(0.2, 0.2) == doctest::Approx(0.2));
}

TEST_CASE("admissible steps give theta in (0, 1)") {
  for (double beta : {1e-3, 0.01, 0.1, 1.0}) {
    for (double mu : {0.01, 0.2, 0.5, 0.9}) {
      const double bound = admissible_step_bound(beta, mu, 1.0).bound;
      for (double frac : {0.01, 0.1, 0.5, 0.99}) {
        const ScheduleParams p{frac * bound, beta, mu, 1.0};
        const auto c = stationary_coefficients(p);
        CHECK(c.theta > 0.0);
        CHECK(c.theta < 1.0);
      }
    }
  }
}

TEST_CASE("without a Lipschitz term the bound alone does not keep s below one") {
  const ScheduleParams p{5.05, 0.1, 0.2};
  CHECK(p.alpha < admissible_step_bound(p.beta, p.mu).bound);
  CHECK(stationary_values(p).s > 1.0);
  CHECK_THROWS_AS(initial_schedule(p), NoRootInUnitInterval);
}
