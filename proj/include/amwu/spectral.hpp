#pragma once

// Linearization of the accelerated step at a critical point: the block
// Jacobian of (x, v) -> (x+, v+), its quadratic factors and the instability
// certificate for strict saddles.

#include <complex>
#include <vector>

#include "amwu/geometry.hpp"
#include "amwu/objectives.hpp"
#include "amwu/schedule.hpp"

namespace amwu {

/// Gradient norm above which a point is not treated as critical.
inline constexpr double kCriticalTolerance = 1e-9;

/// Eigenvalues of B^T Hess f B for a Shahshahani-orthonormal tangent basis B,
/// ascending, d-1 per block. Throws NotCritical.
std::vector<double> riemannian_hessian_eigs(const Objective& obj, const ProductPoint& x_star);

/// Eigenvalues of the curvature in the exp/log chart of the step
/// (step_chart_hessian_matrix), ascending. Throws NotCritical.
std::vector<double> step_chart_eigs(const Objective& obj, const ProductPoint& x_star);

/// [[(1-th)(I-aH), th(I-aH)], [(1-th)((1-z)I-(s/gb)H), ((1-z)th+z)I-(s th/gb)H]]
Matrix assemble_jacobian(const Matrix& hessian, const StepCoefficients& c);
/// Same with H = diag(eigs).
Matrix assemble_jacobian(const std::vector<double>& eigs, const StepCoefficients& c);

struct QuadraticFactor {
  double lambda = 0.0;
  double b = 0.0;
  double c = 0.0;
  double discriminant = 0.0;  ///< b^2 - 4c
  bool real_roots = true;
  std::complex<double> root_low;   ///< smaller real part (or the conjugate with negative imaginary part)
  std::complex<double> root_high;

  /// Largest root modulus.
  double spectral_radius() const;
};

/// g(x) = x^2 + b x + c with b = (alpha(1-th) + s th/gb) lambda - z(1-th) - 1 and
/// c = z(1-th)(1-alpha lambda).
QuadraticFactor quadratic_factor(double lambda, const StepCoefficients& c);

/// Every root of every factor, for the given spectrum.
std::vector<std::complex<double>> factor_roots(const std::vector<double>& eigs, const StepCoefficients& c);

std::vector<std::complex<double>> matrix_eigenvalues(const Matrix& m);

/// Largest distance between matched elements of two equally sized multisets
/// (greedy nearest matching); infinity when the sizes differ.
double multiset_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b);

struct InstabilityCertificate {
  bool unstable = false;       ///< larger root of g_d exceeds 1 + 1e-12
  double max_eig = 0.0;        ///< spectral radius of g_d
  double lambda_min = 0.0;
  QuadraticFactor factor;      ///< g_d
  bool sufficient_inequality = false;  ///< -b(c+1) + (c+1)^2 > -b^2 c
  bool c_positive = false;
};

/// Uses lambda_d = entry.lambda_min(). Throws NotSaddle when lambda_min >= -1e-9.
InstabilityCertificate certify_unstable(const CriticalPointEntry& entry, const StepCoefficients& c);

struct JacobianCheck {
  Matrix analytic;
  Matrix numeric;
  double deviation = 0.0;  ///< max |analytic - numeric|
};

/// Central differences of one frozen-coefficient ragd step around (x*, x*) in
/// the chart x = Exp_{x*}(E xi), v = Exp_{x*}(E eta), against the block
/// formula with the step-chart curvature. Throws NotCritical.
JacobianCheck numerical_jacobian_check(const Objective& obj, const ProductPoint& x_star, const StepCoefficients& c,
                                       double h = 1e-5);

}  // namespace amwu
