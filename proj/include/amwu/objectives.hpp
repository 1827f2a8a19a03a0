#pragma once

// Test-function corpus on products of simplices, finite-difference checks and
// critical-point cataloguing.

#include <functional>
#include <string>
#include <vector>

#include "amwu/geometry.hpp"
#include "amwu/schedule.hpp"

namespace amwu {

/// A smooth function of the joint (flattened) coordinates, defined on an
/// open neighbourhood of the product of simplices so that finite differences
/// may leave the simplex.
class Objective {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;
  using HessFn = std::function<Matrix(const Vector&)>;

  Objective(std::string name, Shape shape, ValueFn value, GradFn grad, HessFn hess = {});

  const std::string& name() const noexcept { return name_; }
  const Shape& shape() const noexcept { return shape_; }
  bool has_hessian() const noexcept { return static_cast<bool>(hess_); }

  double value(const Vector& flat) const;
  double value(const ProductPoint& x) const { return value(x.flatten()); }
  Vector gradient(const Vector& flat) const;
  Vector gradient(const ProductPoint& x) const { return gradient(x.flatten()); }
  /// Throws InvalidArgument when no Hessian was supplied.
  Matrix hessian(const Vector& flat) const;
  Matrix hessian(const ProductPoint& x) const { return hessian(x.flatten()); }

 private:
  std::string name_;
  Shape shape_;
  ValueFn value_;
  GradFn grad_;
  HessFn hess_;
};

/// Settings used for one corpus function in the reference experiments.
struct PaperSetting {
  ProductPoint x0;
  ScheduleParams params;
  long iterations = 2000;
};

/// Names: rosenbrock, bohachevsky, trig1, trig2, two_agent.
std::vector<Objective> make_corpus();
std::vector<std::string> corpus_names();
/// Throws InvalidArgument for an unknown name.
Objective corpus_objective(const std::string& name);
PaperSetting paper_setting(const std::string& name);

/// f(x) = <c, x>
Objective linear_objective(const Vector& c, const Shape& shape);
/// f(x) = 0.5 |x - center|^2
Objective quadratic_objective(const ProductPoint& center);

/// Largest per-coordinate error |analytic - central difference| / max(1, |analytic|).
double check_gradient(const Objective& obj, const Vector& point, double h = 1e-6);
/// Largest |analytic Hessian - central difference of the gradient|.
double check_hessian(const Objective& obj, const Vector& point, double h = 1e-5);
/// Largest |H - H^T|.
double hessian_asymmetry(const Objective& obj, const Vector& point);

/// Shahshahani norm of the Riemannian gradient at x.
double riemannian_gradient_norm(const Objective& obj, const ProductPoint& x);

/// B^T Hess f B for a metric-orthonormal tangent basis B at x.
Matrix riemannian_hessian_matrix(const Objective& obj, const ProductPoint& x);
/// E^T Q Hess f Q E with E Euclidean-orthonormal on the sum-zero space and
/// Q = diag(x) - x x^T: the curvature seen by the exp/log chart of the step.
Matrix step_chart_hessian_matrix(const Objective& obj, const ProductPoint& x);

enum class Classification { min, strict_saddle, max, degenerate };
const char* to_string(Classification c);

inline constexpr double kCurvatureTolerance = 1e-9;

/// min: all eigenvalues > tol; max: all < -tol; strict_saddle: some < -tol
/// and not all; degenerate otherwise.
Classification classify(const std::vector<double>& sorted_eigs);

struct CriticalPointEntry {
  ProductPoint point;
  std::vector<double> hessian_eigs;  ///< Riemannian Hessian, ascending
  Classification classification = Classification::degenerate;
  double grad_norm = 0.0;

  double lambda_min() const { return hessian_eigs.empty() ? 0.0 : hessian_eigs.front(); }
  /// lambda_min < -kCurvatureTolerance (saddles and maxima).
  bool has_negative_curvature() const { return lambda_min() < -kCurvatureTolerance; }
};

struct CriticalSearchResult {
  std::vector<CriticalPointEntry> entries;
  int failed_seeds = 0;
};

/// Interior lattice (k_i + 1)/(n + d) with sum k_i = n, per block; the product
/// takes every combination of block points.
std::vector<ProductPoint> simplex_grid(const Shape& shape, int n);

/// Damped Newton on the reduced coordinates (last coordinate of each block
/// eliminated) from every seed until the Riemannian gradient norm is below
/// `tol`. Entries within `dedupe` of each other are merged.
CriticalSearchResult find_critical_points(const Objective& obj, const std::vector<ProductPoint>& seeds,
                                          double tol = 1e-12, double dedupe = 1e-6);

}  // namespace amwu
