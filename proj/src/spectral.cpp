#include "amwu/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "amwu/algorithms.hpp"
#include "amwu/errors.hpp"

namespace amwu {

namespace {

void require_critical(const Objective& obj, const ProductPoint& x) {
  const double g = riemannian_gradient_norm(obj, x);
  if (!(g < kCriticalTolerance)) {
    std::ostringstream os;
    os << "gradient norm " << g << " at a point expected to be critical";
    throw NotCritical(os.str());
  }
}

std::vector<double> sorted_eigs(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<double> riemannian_hessian_eigs(const Objective& obj, const ProductPoint& x_star) {
  require_critical(obj, x_star);
  return sorted_eigs(riemannian_hessian_matrix(obj, x_star));
}

std::vector<double> step_chart_eigs(const Objective& obj, const ProductPoint& x_star) {
  require_critical(obj, x_star);
  return sorted_eigs(step_chart_hessian_matrix(obj, x_star));
}

Matrix assemble_jacobian(const Matrix& h, const StepCoefficients& c) {
  if (h.rows() != h.cols()) throw DimensionMismatch("assemble_jacobian: Hessian must be square");
  const Index d = h.rows();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix step = id - c.alpha * h;
  const double th = c.theta;
  const double z = c.zeta;
  const double k = c.s / c.gamma_bar;
  Matrix j(2 * d, 2 * d);
  j.topLeftCorner(d, d) = (1.0 - th) * step;
  j.topRightCorner(d, d) = th * step;
  j.bottomLeftCorner(d, d) = (1.0 - th) * ((1.0 - z) * id - k * h);
  j.bottomRightCorner(d, d) = ((1.0 - z) * th + z) * id - (k * th) * h;
  return j;
}

Matrix assemble_jacobian(const std::vector<double>& eigs, const StepCoefficients& c) {
  const Vector diag = Eigen::Map<const Vector>(eigs.data(), static_cast<Index>(eigs.size()));
  return assemble_jacobian(Matrix(diag.asDiagonal()), c);
}

double QuadraticFactor::spectral_radius() const { return std::max(std::abs(root_low), std::abs(root_high)); }

QuadraticFactor quadratic_factor(double lambda, const StepCoefficients& k) {
  QuadraticFactor q;
  q.lambda = lambda;
  q.b = (k.alpha * (1.0 - k.theta) + k.s * k.theta / k.gamma_bar) * lambda - k.zeta * (1.0 - k.theta) - 1.0;
  q.c = k.zeta * (1.0 - k.theta) * (1.0 - k.alpha * lambda);
  q.discriminant = q.b * q.b - 4.0 * q.c;
  q.real_roots = q.discriminant >= 0.0;
  if (q.real_roots) {
    const double sq = std::sqrt(q.discriminant);
    // Larger-magnitude root first, the other from Vieta to avoid cancellation.
    const double big = q.b <= 0.0 ? (-q.b + sq) / 2.0 : (-q.b - sq) / 2.0;
    const double other = big != 0.0 ? q.c / big : 0.0;
    q.root_low = std::min(big, other);
    q.root_high = std::max(big, other);
  } else {
    const double im = std::sqrt(-q.discriminant) / 2.0;
    q.root_low = {-q.b / 2.0, -im};
    q.root_high = {-q.b / 2.0, im};
  }
  return q;
}

std::vector<std::complex<double>> factor_roots(const std::vector<double>& eigs, const StepCoefficients& c) {
  std::vector<std::complex<double>> out;
  out.reserve(2 * eigs.size());
  for (double l : eigs) {
    const auto q = quadratic_factor(l, c);
    out.push_back(q.root_low);
    out.push_back(q.root_high);
  }
  return out;
}

std::vector<std::complex<double>> matrix_eigenvalues(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double multiset_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const auto& x : a) {
    auto best = b.begin();
    double bd = std::numeric_limits<double>::infinity();
    for (auto it = b.begin(); it != b.end(); ++it) {
      const double dist = std::abs(*it - x);
      if (dist < bd) {
        bd = dist;
        best = it;
      }
    }
    worst = std::max(worst, bd);
    b.erase(best);
  }
  return worst;
}

InstabilityCertificate certify_unstable(const CriticalPointEntry& entry, const StepCoefficients& c) {
  const double lmin = entry.lambda_min();
  if (!(lmin < -kCurvatureTolerance)) {
    std::ostringstream os;
    os << "lambda_min = " << lmin << " is not negative";
    throw NotSaddle(os.str());
  }
  InstabilityCertificate cert;
  cert.lambda_min = lmin;
  cert.factor = quadratic_factor(lmin, c);
  cert.max_eig = cert.factor.spectral_radius();
  cert.unstable = cert.max_eig > 1.0 + 1e-12;
  const double b = cert.factor.b;
  const double cc = cert.factor.c;
  cert.sufficient_inequality = -b * (cc + 1.0) + (cc + 1.0) * (cc + 1.0) > -b * b * cc;
  cert.c_positive = cc > 0.0;
  return cert;
}

JacobianCheck numerical_jacobian_check(const Objective& obj, const ProductPoint& x_star, const StepCoefficients& c,
                                       double h) {
  require_critical(obj, x_star);
  const Shape shape = x_star.shape();
  const Matrix e = tangent_basis(shape);
  const Index m = e.cols();
  const std::vector<StepCoefficients> coeffs(x_star.num_blocks(), c);

  auto chart_point = [&](const Vector& xi) {
    return product_exp(x_star, ProductTangent::from_flat(e * xi, shape));
  };
  auto chart_coords = [&](const ProductPoint& p) -> Vector {
    return e.transpose() * product_log(x_star, p).flatten();
  };
  auto step = [&](const Vector& z) {
    const auto up = ragd_update(chart_point(z.head(m)), chart_point(z.tail(m)), obj, coeffs);
    Vector out(2 * m);
    out << chart_coords(up.x_next), chart_coords(up.v_next);
    return out;
  };

  JacobianCheck res;
  res.numeric.resize(2 * m, 2 * m);
  for (Index j = 0; j < 2 * m; ++j) {
    Vector zp = Vector::Zero(2 * m);
    Vector zm = Vector::Zero(2 * m);
    zp[j] = h;
    zm[j] = -h;
    res.numeric.col(j) = (step(zp) - step(zm)) / (2.0 * h);
  }
  res.analytic = assemble_jacobian(step_chart_hessian_matrix(obj, x_star), c);
  res.deviation = (res.analytic - res.numeric).cwiseAbs().maxCoeff();
  return res;
}

}  // namespace amwu
