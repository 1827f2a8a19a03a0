// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <fmt/format.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "amwu/algorithms.hpp"
#include "amwu/harness/experiments.hpp"
#include "amwu/spectral.hpp"

using namespace amwu;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  if (!ok) ++failures;
  fmt::print("{} criterion {:>2}: {} | {}\n", ok ? "PASS" : "FAIL", id, what, detail);
  std::fflush(stdout);
}

void guarded(int id, const std::string& what, const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto [ok, detail] = body();
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(id, ok, what, fmt::format("{} ({:.1f} s)", detail, sec));
  } catch (const std::exception& e) {
    report(id, false, what, fmt::format("threw: {}", e.what()));
  }
}

SimplexPoint random_point(std::mt19937_64& rng, Index d) {
  std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
  Vector w(d);
  for (Index i = 0; i < d; ++i) w[i] = u(rng);
  return SimplexPoint::normalized(w);
}

double violation(const ProductPoint& p) {
  double worst = 0.0;
  for (const auto& b : p.blocks()) {
    if (!(b.weights().minCoeff() > 0.0)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(b.weights().sum() - 1.0));
  }
  return worst;
}

// Root of s^2 + alpha(gamma - mu)s - alpha gamma on (0, 1) by bisection.
double bisect_s(double alpha, double gamma, double mu) {
  auto q = [&](double s) { return s * s + alpha * (gamma - mu) * s - alpha * gamma; };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (q(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

const std::vector<std::string> kAlgorithms{"mwu", "amwu_literal", "amwu_ragd", "amd:3"};

}  // namespace

int main() {
  guarded(1, "exp/log round trip", [] {
    std::mt19937_64 rng(1);
    double worst = 0.0, worst_sum = 0.0;
    int pairs = 0;
    for (Index d : {2, 3, 5, 10}) {
      for (int k = 0; k < 2500; ++k, ++pairs) {
        const auto x = random_point(rng, d);
        const auto y = random_point(rng, d);
        const auto u = log_map(x, y);
        worst_sum = std::max(worst_sum, std::abs(u.components().sum()));
        worst = std::max(worst, (exp_map(x, u).weights() - y.weights()).cwiseAbs().maxCoeff());
      }
    }
    return std::pair{worst < 1e-10 && worst_sum < 1e-12,
                     fmt::format("{} pairs, max error {:.3g}, max |sum Log| {:.3g}", pairs, worst, worst_sum)};
  });

  guarded(2, "MWU equals the projected Riemannian step", [] {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n01;
    std::uniform_real_distribution<double> step(1e-4, 0.05);
    double worst = 0.0, tangent_gap = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const Index d = 2 + k % 6;
      const auto x = random_point(rng, d);
      Vector g(d);
      for (Index i = 0; i < d; ++i) g[i] = n01(rng);
      const double a = step(rng);
      const Vector m = mwu_retract(x, g, a).weights();
      worst = std::max(worst, (m - (x.weights() + projected_displacement(x, g, a))).cwiseAbs().maxCoeff());
      const Vector plain = x.weights() - a * shahshahani_gradient(x, g).components();
      tangent_gap = std::max(tangent_gap, (m - plain).cwiseAbs().maxCoeff());
    }
    return std::pair{worst < 1e-14,
                     fmt::format("1000 cases, max |MWU - (x + V(x) - x)| {:.3g}; tangent-form step differs by up to "
                                 "{:.3g} (second order)",
                                 worst, tangent_gap)};
  });

  guarded(3, "schedule correctness", [] {
    double residual = 0.0;
    for (const auto& name : corpus_names()) {
      auto cfg = harness::preset(name);
      for (const std::string a : {"amwu_ragd", "amwu_literal"}) {
        const auto tr = harness::run_algorithm(cfg, a, false);
        const auto p = harness::schedule_params(cfg).front();
        for (const auto& r : tr.records) {
          for (const auto& s : r.schedules) residual = std::max(residual, schedule_residual(p, s.s, s.gamma));
        }
      }
    }
    double fixed = 0.0;
    std::vector<ScheduleParams> sets{{0.01, 0.1, 1.0}};
    for (const auto& name : corpus_names()) sets.push_back(paper_setting(name).params);
    for (const auto& p : sets) {
      const auto sv = stationary_values(p);
      const ScheduleState st{sv.s, sv.gamma, (1.0 - sv.s) * sv.gamma + sv.s * p.mu, 0};
      fixed = std::max({fixed, std::abs(solve_s(p, sv.gamma) - sv.s), std::abs(advance(p, st).gamma - sv.gamma)});
    }
    const double s_star = stationary_values(ScheduleParams{0.01, 0.1, 1.0}).s;
    const double gamma_star = stationary_values(ScheduleParams{0.01, 0.1, 1.0}).gamma;
    const double oracle = bisect_s(0.01, gamma_star, 1.0);
    const bool ok = residual < 1e-12 && fixed < 1e-10 && std::abs(s_star - 0.0661895) <= 1e-6 &&
                    std::abs(oracle - s_star) <= 1e-12;
    return std::pair{ok, fmt::format("max residual {:.3g}, fixed-point error {:.3g}, s* {:.9f} (bisection {:.9f})",
                                     residual, fixed, s_star, oracle)};
  });

  guarded(4, "gradient checks", [] {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.02, 1.0);
    double worst = 0.0;
    for (const auto& obj : make_corpus()) {
      for (int k = 0; k < 100; ++k) {
        Vector flat(total_dim(obj.shape()));
        std::vector<SimplexPoint> blocks;
        for (Index d : obj.shape()) {
          Vector w(d);
          for (Index i = 0; i < d; ++i) w[i] = u(rng);
          blocks.push_back(SimplexPoint::normalized(w));
        }
        worst = std::max(worst, check_gradient(obj, ProductPoint(blocks).flatten(), 1e-6));
      }
    }
    return std::pair{worst < 1e-6, fmt::format("5 objectives x 100 points, max relative error {:.3g}", worst)};
  });

  guarded(5, "simplex invariance", [] {
    double worst = 0.0;
    long points = 0;
    for (const auto& name : corpus_names()) {
      const auto cfg = harness::preset(name);
      for (const auto& a : kAlgorithms) {
        const auto tr = harness::run_algorithm(cfg, a, true);
        for (const auto& r : tr.records) {
          worst = std::max({worst, violation(*r.x), violation(*r.y)});
          points += 2;
          if (r.v) {
            worst = std::max(worst, violation(*r.v));
            ++points;
          }
        }
      }
    }
    return std::pair{worst < 1e-12, fmt::format("{} recorded points, max |sum - 1| {:.3g}", points, worst)};
  });

  guarded(6, "critical points are fixed points", [] {
    double worst = 0.0;
    int count = 0;
    for (const auto& name : corpus_names()) {
      const auto obj = corpus_objective(name);
      const auto p = paper_setting(name).params;
      for (const auto& e : harness::catalog(obj, 24)) {
        for (AmwuMode mode : {AmwuMode::ragd, AmwuMode::literal}) {
          const auto s1 = amwu_step(make_state(e.point, std::nullopt, {p}), obj, p, mode);
          worst = std::max({worst, max_abs_difference(s1.x, e.point), max_abs_difference(s1.v, e.point)});
        }
        ++count;
      }
    }
    return std::pair{worst < 1e-12 && count > 0,
                     fmt::format("{} catalogued points, both modes, max move {:.3g}", count, worst)};
  });

  guarded(7, "spectral factorization", [] {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lam(-2.0, 2.0), unit(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double beta = std::pow(10.0, -3.0 + 3.0 * unit(rng));
      const double mu = 0.01 + 0.98 * unit(rng);
      const double bound = admissible_step_bound(beta, mu, 1.0).bound;
      const ScheduleParams p{bound * (0.001 + 0.998 * unit(rng)), beta, mu, 1.0};
      const auto c = stationary_coefficients(p);
      std::vector<double> eigs(1 + k % 8);
      for (double& l : eigs) l = lam(rng);
      worst = std::max(worst, multiset_distance(matrix_eigenvalues(assemble_jacobian(eigs, c)), factor_roots(eigs, c)));
    }
    return std::pair{worst < 1e-8, fmt::format("200 pairs, max multiset distance {:.3g}", worst)};
  });

  guarded(8, "instability certification", [] {
    const auto c = appendix_coefficients(ScheduleParams{0.01, 0.1, 0.2});
    const Matrix j = assemble_jacobian(std::vector<double>{-1.0}, c);
    Eigen::EigenSolver<Matrix> es(j);
    double top = 0.0;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) top = std::max(top, std::abs(es.eigenvalues()[i]));
    const double root = quadratic_factor(-1.0, c).root_high.real();
    bool ok = std::abs(top - 1.0224) <= 1e-3 && std::abs(root - top) < 1e-12;
    int saddles = 0, unstable = 0;
    double worst_dev = 0.0, min_eig = std::numeric_limits<double>::infinity();
    for (const std::string name : {"trig1", "trig2"}) {
      const auto obj = corpus_objective(name);
      const auto coeffs = stationary_coefficients(paper_setting(name).params);
      for (const auto& e : harness::catalog(obj, 24)) {
        if (e.classification != Classification::strict_saddle) continue;
        ++saddles;
        const auto cert = certify_unstable(e, coeffs);
        if (cert.unstable) ++unstable;
        min_eig = std::min(min_eig, cert.max_eig);
        worst_dev = std::max(worst_dev, numerical_jacobian_check(obj, e.point, coeffs, 1e-5).deviation);
      }
    }
    ok = ok && saddles > 0 && unstable == saddles && worst_dev < 1e-5;
    return std::pair{ok, fmt::format("benchmark root {:.6f}; {}/{} saddles unstable (smallest max_eig {:.6f}); "
                                     "max Jacobian deviation {:.3g}",
                                     top, unstable, saddles, min_eig, worst_dev)};
  });

  guarded(9, "convergence ordering", [] {
    auto final_f = [](const std::string& name, const std::string& algo) {
      return harness::run_algorithm(harness::preset(name), algo, false).records.back().f_value;
    };
    const double ra = final_f("rosenbrock", "amwu"), rm = final_f("rosenbrock", "mwu");
    const double ba = final_f("bohachevsky", "amwu"), bm = final_f("bohachevsky", "mwu");
    const double bl = final_f("bohachevsky", "amwu_literal");
    return std::pair{ra <= rm && ba <= bm,
                     fmt::format("rosenbrock t=2000 A-MWU {:.6g} vs MWU {:.6g}; bohachevsky t=5000 A-MWU {:.6g} "
                                 "(literal {:.6g}) vs MWU {:.6g}",
                                 ra, rm, ba, bl, bm)};
  });

  guarded(10, "saddle escape", [] {
    auto cfg = harness::preset("trig1");
    const auto obj = corpus_objective("trig1");
    const auto cat = harness::catalog(obj, cfg.avoidance.grid);
    const double radius = 0.1;
    const auto ea = harness::escape_iteration(harness::run_algorithm(cfg, "amwu"), cat, radius);
    const auto em = harness::escape_iteration(harness::run_algorithm(cfg, "mwu"), cat, radius);
    const bool proxy = ea.escaped && (!em.escaped || *ea.escaped < *em.escaped);
    auto show = [](const harness::EscapeResult& e) {
      return fmt::format("closest {:.3g}, min grad near {:.3g}, escape {}", e.closest, e.min_grad,
                         e.escaped ? std::to_string(*e.escaped) : std::string("never"));
    };
    cfg.avoidance.trials = 500;
    cfg.avoidance.radius = 0.05;
    const auto rep = harness::cli_avoidance(cfg);
    const double frac = static_cast<double>(rep.converged_to_saddle) / static_cast<double>(rep.trials);
    return std::pair{proxy && frac <= 0.01,
                     fmt::format("escape proxy A-MWU [{}] vs MWU [{}]; avoidance {}/{} to saddle, {} to min, {} "
                                 "nonconverged",
                                 show(ea), show(em), rep.converged_to_saddle, rep.trials, rep.converged_to_min,
                                 rep.nonconverged)};
  });

  guarded(11, "A-MD smoothness", [] {
    const auto cfg = harness::preset("rosenbrock");
    const double s3 = harness::smoothness(harness::run_algorithm(cfg, "amd:3", false));
    const double s9 = harness::smoothness(harness::run_algorithm(cfg, "amd:9", false));
    return std::pair{s9 <= s3, fmt::format("mean squared successive difference r=9 {:.4g}, r=3 {:.4g}", s9, s3)};
  });

  guarded(12, "multi-agent reduction", [] {
    const auto joint = corpus_objective("two_agent");
    const Objective f1("f1", Shape{2}, [](const Vector& v) { return std::cos(10 * v[0]) * std::sin(v[1]); },
                       [](const Vector& v) {
                         return Vector((Vector(2) << -10 * std::sin(10 * v[0]) * std::sin(v[1]),
                                        std::cos(10 * v[0]) * std::cos(v[1]))
                                           .finished());
                       });
    const Objective f2("f2", Shape{2}, [](const Vector& v) { return std::sin(10 * v[0]) * std::cos(v[1]); },
                       [](const Vector& v) {
                         return Vector((Vector(2) << 10 * std::cos(10 * v[0]) * std::cos(v[1]),
                                        -std::sin(10 * v[0]) * std::sin(v[1]))
                                           .finished());
                       });
    const auto set = paper_setting("two_agent");
    const std::vector<ScheduleParams> per{set.params, ScheduleParams{0.002, 0.05, 0.3}};
    double worst = 0.0;
    for (AmwuMode mode : {AmwuMode::ragd, AmwuMode::literal}) {
      auto js = make_state(set.x0, std::nullopt, per);
      auto a = make_state(ProductPoint(set.x0.block(0)), std::nullopt, {per[0]});
      auto b = make_state(ProductPoint(set.x0.block(1)), std::nullopt, {per[1]});
      for (int t = 0; t < 1000; ++t) {
        js = multi_agent_amwu_step(js, joint, per, mode);
        a = amwu_step(a, f1, per[0], mode);
        b = amwu_step(b, f2, per[1], mode);
        worst = std::max({worst, (js.x.block(0).weights() - a.x.block(0).weights()).cwiseAbs().maxCoeff(),
                          (js.x.block(1).weights() - b.x.block(0).weights()).cwiseAbs().maxCoeff(),
                          (js.v.block(0).weights() - a.v.block(0).weights()).cwiseAbs().maxCoeff(),
                          (js.v.block(1).weights() - b.v.block(0).weights()).cwiseAbs().maxCoeff()});
      }
    }
    return std::pair{worst < 1e-12, fmt::format("1000 steps, both modes, max block difference {:.3g}", worst)};
  });

  guarded(13, "step-bound soundness", [] {
    long cases = 0, bad = 0;
    for (int i = 0; i < 20; ++i) {
      const double beta = std::pow(10.0, -3.0 + 3.0 * i / 19.0);
      for (int j = 0; j < 20; ++j) {
        const double mu = (j + 0.5) / 20.0;
        const double bound = admissible_step_bound(beta, mu, 1.0).bound;
        for (int k = 0; k < 20; ++k) {
          const ScheduleParams p{bound * (k + 0.5) / 20.0, beta, mu, 1.0};
          const auto c = stationary_coefficients(p);
          for (double l : {-0.1, -1.0, -10.0}) {
            const auto q = quadratic_factor(l, c);
            const bool ineq = -q.b * (q.c + 1.0) + (q.c + 1.0) * (q.c + 1.0) > -q.b * q.b * q.c;
            ++cases;
            if (!(q.c > 0.0) || !ineq) ++bad;
          }
        }
      }
    }
    return std::pair{bad == 0, fmt::format("{} grid cases with L = 1, {} violations", cases, bad)};
  });

  fmt::print("{} of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
