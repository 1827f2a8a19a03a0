#include "amwu/objectives.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>

#include "amwu/errors.hpp"

namespace amwu {

Objective::Objective(std::string name, Shape shape, ValueFn value, GradFn grad, HessFn hess)
    : name_(std::move(name)), shape_(std::move(shape)), value_(std::move(value)), grad_(std::move(grad)),
      hess_(std::move(hess)) {}

namespace {

void require_dim(const Objective& obj, const Vector& flat) {
  if (flat.size() != total_dim(obj.shape())) {
    throw DimensionMismatch("objective '" + obj.name() + "': wrong coordinate count");
  }
}

}  // namespace

double Objective::value(const Vector& flat) const {
  require_dim(*this, flat);
  return value_(flat);
}

Vector Objective::gradient(const Vector& flat) const {
  require_dim(*this, flat);
  return grad_(flat);
}

Matrix Objective::hessian(const Vector& flat) const {
  require_dim(*this, flat);
  if (!hess_) throw InvalidArgument("objective '" + name_ + "' has no Hessian");
  return hess_(flat);
}

// ---------------------------------------------------------------------------
// Corpus. Three-variable functions carry the "+ x + y + z - 1" term, which
// vanishes on the simplex.

namespace {

constexpr double kPi = std::numbers::pi;

Objective rosenbrock() {
  auto f = [](const Vector& p) {
    const double x = p[0], y = p[1], z = p[2];
    return (0.5 - x) * (0.5 - x) + 0.25 * (y - x * x) * (y - x * x) + x + y + z - 1.0;
  };
  auto g = [](const Vector& p) {
    const double x = p[0], y = p[1];
    Vector out(3);
    out << -2.0 * (0.5 - x) - x * (y - x * x) + 1.0, 0.5 * (y - x * x) + 1.0, 1.0;
    return out;
  };
  auto h = [](const Vector& p) {
    const double x = p[0], y = p[1];
    Matrix out = Matrix::Zero(3, 3);
    out(0, 0) = 2.0 - y + 3.0 * x * x;
    out(0, 1) = out(1, 0) = -x;
    out(1, 1) = 0.5;
    return out;
  };
  return Objective("rosenbrock", {3}, f, g, h);
}

Objective bohachevsky() {
  auto f = [](const Vector& p) {
    const double x = p[0], y = p[1], z = p[2];
    return x * x + 2.0 * y * y - 0.3 * std::cos(3.0 * kPi * x) - 0.4 * std::cos(4.0 * kPi * y) + x + y + z - 1.0;
  };
  auto g = [](const Vector& p) {
    const double x = p[0], y = p[1];
    Vector out(3);
    out << 2.0 * x + 0.9 * kPi * std::sin(3.0 * kPi * x) + 1.0, 4.0 * y + 1.6 * kPi * std::sin(4.0 * kPi * y) + 1.0,
        1.0;
    return out;
  };
  auto h = [](const Vector& p) {
    const double x = p[0], y = p[1];
    Matrix out = Matrix::Zero(3, 3);
    out(0, 0) = 2.0 + 2.7 * kPi * kPi * std::cos(3.0 * kPi * x);
    out(1, 1) = 4.0 + 6.4 * kPi * kPi * std::cos(4.0 * kPi * y);
    return out;
  };
  return Objective("bohachevsky", {3}, f, g, h);
}

Objective trig1() {
  constexpr double a = 8.5;
  auto f = [](const Vector& p) {
    return std::cos(a * p[0]) * std::sin(a * (p[1] - 0.4)) + std::sin(a * p[2]);
  };
  auto g = [](const Vector& p) {
    const double cx = std::cos(a * p[0]), sx = std::sin(a * p[0]);
    const double cy = std::cos(a * (p[1] - 0.4)), sy = std::sin(a * (p[1] - 0.4));
    Vector out(3);
    out << -a * sx * sy, a * cx * cy, a * std::cos(a * p[2]);
    return out;
  };
  auto h = [](const Vector& p) {
    const double cx = std::cos(a * p[0]), sx = std::sin(a * p[0]);
    const double cy = std::cos(a * (p[1] - 0.4)), sy = std::sin(a * (p[1] - 0.4));
    Matrix out = Matrix::Zero(3, 3);
    out(0, 0) = -a * a * cx * sy;
    out(0, 1) = out(1, 0) = -a * a * sx * cy;
    out(1, 1) = -a * a * cx * sy;
    out(2, 2) = -a * a * std::sin(a * p[2]);
    return out;
  };
  return Objective("trig1", {3}, f, g, h);
}

Objective trig2() {
  auto f = [](const Vector& p) {
    return std::cos(0.7 * p[0]) * std::sin(p[1]) * std::sin(0.9 * p[2]) + p[0] * p[0];
  };
  auto g = [](const Vector& p) {
    const double cx = std::cos(0.7 * p[0]), sx = std::sin(0.7 * p[0]);
    const double cy = std::cos(p[1]), sy = std::sin(p[1]);
    const double cz = std::cos(0.9 * p[2]), sz = std::sin(0.9 * p[2]);
    Vector out(3);
    out << -0.7 * sx * sy * sz + 2.0 * p[0], cx * cy * sz, 0.9 * cx * sy * cz;
    return out;
  };
  auto h = [](const Vector& p) {
    const double cx = std::cos(0.7 * p[0]), sx = std::sin(0.7 * p[0]);
    const double cy = std::cos(p[1]), sy = std::sin(p[1]);
    const double cz = std::cos(0.9 * p[2]), sz = std::sin(0.9 * p[2]);
    Matrix out(3, 3);
    out(0, 0) = -0.49 * cx * sy * sz + 2.0;
    out(0, 1) = out(1, 0) = -0.7 * sx * cy * sz;
    out(0, 2) = out(2, 0) = -0.63 * sx * sy * cz;
    out(1, 1) = -cx * sy * sz;
    out(1, 2) = out(2, 1) = 0.9 * cx * cy * cz;
    out(2, 2) = -0.81 * cx * sy * sz;
    return out;
  };
  return Objective("trig2", {3}, f, g, h);
}

// Blocks (x1, x2) and (y1, y2).
Objective two_agent() {
  auto f = [](const Vector& p) {
    return std::cos(10.0 * p[0]) * std::sin(p[1]) + std::sin(10.0 * p[2]) * std::cos(p[3]);
  };
  auto g = [](const Vector& p) {
    Vector out(4);
    out << -10.0 * std::sin(10.0 * p[0]) * std::sin(p[1]), std::cos(10.0 * p[0]) * std::cos(p[1]),
        10.0 * std::cos(10.0 * p[2]) * std::cos(p[3]), -std::sin(10.0 * p[2]) * std::sin(p[3]);
    return out;
  };
  auto h = [](const Vector& p) {
    Matrix out = Matrix::Zero(4, 4);
    out(0, 0) = -100.0 * std::cos(10.0 * p[0]) * std::sin(p[1]);
    out(0, 1) = out(1, 0) = -10.0 * std::sin(10.0 * p[0]) * std::cos(p[1]);
    out(1, 1) = -std::cos(10.0 * p[0]) * std::sin(p[1]);
    out(2, 2) = -100.0 * std::sin(10.0 * p[2]) * std::cos(p[3]);
    out(2, 3) = out(3, 2) = -10.0 * std::cos(10.0 * p[2]) * std::sin(p[3]);
    out(3, 3) = -std::sin(10.0 * p[2]) * std::cos(p[3]);
    return out;
  };
  return Objective("two_agent", {2, 2}, f, g, h);
}

}  // namespace

std::vector<Objective> make_corpus() { return {rosenbrock(), bohachevsky(), trig1(), trig2(), two_agent()}; }

std::vector<std::string> corpus_names() { return {"rosenbrock", "bohachevsky", "trig1", "trig2", "two_agent"}; }

Objective corpus_objective(const std::string& name) {
  for (auto& obj : make_corpus()) {
    if (obj.name() == name) return obj;
  }
  throw InvalidArgument("unknown objective '" + name + "'");
}

PaperSetting paper_setting(const std::string& name) {
  auto point = [](std::initializer_list<double> w) {
    Vector v(static_cast<Index>(w.size()));
    Index i = 0;
    for (double x : w) v[i++] = x;
    return SimplexPoint::normalized(v);
  };
  auto params = [](double alpha, double beta, double mu) {
    ScheduleParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.mu = mu;
    return p;
  };
  if (name == "rosenbrock") return {ProductPoint(point({0.2, 0.4, 0.4})), params(0.01, 0.001, 1.0), 2000};
  if (name == "bohachevsky") return {ProductPoint(point({0.35, 0.3, 0.35})), params(0.001, 0.1, 1.0), 5000};
  // (0.42, 0.24, 0.33) sums to 0.99; normalized onto the simplex.
  if (name == "trig1") return {ProductPoint(point({0.42, 0.24, 0.33})), params(0.005, 0.1, 0.2), 2000};
  // Step size from the figure caption (0.01); the prose gives 0.05.
  if (name == "trig2") return {ProductPoint(point({0.6, 0.2, 0.2})), params(0.01, 0.001, 0.001), 2000};
  if (name == "two_agent") {
    return {ProductPoint({point({0.3, 0.7}), point({0.6, 0.4})}), params(0.001, 0.1, 0.5), 5000};
  }
  throw InvalidArgument("unknown objective '" + name + "'");
}

Objective linear_objective(const Vector& c, const Shape& shape) {
  const Index n = c.size();
  return Objective(
      "linear", shape, [c](const Vector& p) { return c.dot(p); }, [c](const Vector&) { return c; },
      [n](const Vector&) { return Matrix(Matrix::Zero(n, n)); });
}

Objective quadratic_objective(const ProductPoint& center) {
  const Vector c = center.flatten();
  const Index n = c.size();
  return Objective(
      "quadratic", center.shape(), [c](const Vector& p) { return 0.5 * (p - c).squaredNorm(); },
      [c](const Vector& p) { return Vector(p - c); }, [n](const Vector&) { return Matrix(Matrix::Identity(n, n)); });
}

// ---------------------------------------------------------------------------

double check_gradient(const Objective& obj, const Vector& point, double h) {
  const Vector analytic = obj.gradient(point);
  double worst = 0.0;
  for (Index i = 0; i < point.size(); ++i) {
    Vector up = point, down = point;
    up[i] += h;
    down[i] -= h;
    const double numeric = (obj.value(up) - obj.value(down)) / (2.0 * h);
    worst = std::max(worst, std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(analytic[i])));
  }
  return worst;
}

double check_hessian(const Objective& obj, const Vector& point, double h) {
  const Matrix analytic = obj.hessian(point);
  double worst = 0.0;
  for (Index j = 0; j < point.size(); ++j) {
    Vector up = point, down = point;
    up[j] += h;
    down[j] -= h;
    const Vector column = (obj.gradient(up) - obj.gradient(down)) / (2.0 * h);
    worst = std::max(worst, (analytic.col(j) - column).cwiseAbs().maxCoeff());
  }
  return worst;
}

double hessian_asymmetry(const Objective& obj, const Vector& point) {
  const Matrix h = obj.hessian(point);
  return (h - h.transpose()).cwiseAbs().maxCoeff();
}

double riemannian_gradient_norm(const Objective& obj, const ProductPoint& x) {
  return product_norm(x, product_gradient(x, obj.gradient(x)));
}

Matrix riemannian_hessian_matrix(const Objective& obj, const ProductPoint& x) {
  const Matrix basis = metric_orthonormal_basis(x);
  Matrix h = basis.transpose() * obj.hessian(x) * basis;
  return 0.5 * (h + h.transpose());
}

Matrix step_chart_hessian_matrix(const Objective& obj, const ProductPoint& x) {
  const Matrix q = exp_differential(x);
  const Matrix e = tangent_basis(x.shape());
  Matrix h = e.transpose() * q * obj.hessian(x) * q * e;
  return 0.5 * (h + h.transpose());
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::min:
      return "min";
    case Classification::strict_saddle:
      return "strict_saddle";
    case Classification::max:
      return "max";
    case Classification::degenerate:
      return "degenerate";
  }
  return "unknown";
}

Classification classify(const std::vector<double>& eigs) {
  if (eigs.empty()) return Classification::degenerate;
  const double lo = eigs.front();
  const double hi = eigs.back();
  if (lo > kCurvatureTolerance) return Classification::min;
  if (hi < -kCurvatureTolerance) return Classification::max;
  if (lo < -kCurvatureTolerance) return Classification::strict_saddle;
  return Classification::degenerate;
}

// ---------------------------------------------------------------------------

std::vector<ProductPoint> simplex_grid(const Shape& shape, int n) {
  std::vector<std::vector<SimplexPoint>> per_block;
  for (Index d : shape) {
    std::vector<SimplexPoint> points;
    std::vector<int> k(static_cast<std::size_t>(d), 0);
    // Enumerate compositions of n into d non-negative parts.
    std::function<void(Index, int)> rec = [&](Index i, int remaining) {
      if (i == d - 1) {
        k[static_cast<std::size_t>(i)] = remaining;
        Vector w(d);
        for (Index j = 0; j < d; ++j) w[j] = (k[static_cast<std::size_t>(j)] + 1.0) / (n + static_cast<double>(d));
        points.push_back(SimplexPoint::normalized(w));
        return;
      }
      for (int v = 0; v <= remaining; ++v) {
        k[static_cast<std::size_t>(i)] = v;
        rec(i + 1, remaining - v);
      }
    };
    rec(0, n);
    per_block.push_back(std::move(points));
  }
  std::vector<ProductPoint> out;
  std::vector<std::size_t> idx(shape.size(), 0);
  while (true) {
    std::vector<SimplexPoint> blocks;
    for (std::size_t b = 0; b < shape.size(); ++b) blocks.push_back(per_block[b][idx[b]]);
    out.emplace_back(std::move(blocks));
    std::size_t b = 0;
    while (b < shape.size() && ++idx[b] == per_block[b].size()) {
      idx[b] = 0;
      ++b;
    }
    if (b == shape.size()) break;
  }
  return out;
}

namespace {

// Maps reduced coordinates (first d_i - 1 of each block) to the joint ones.
Matrix elimination_matrix(const Shape& shape) {
  const Index n = total_dim(shape);
  Index m = 0;
  for (Index d : shape) m += d - 1;
  Matrix a = Matrix::Zero(n, m);
  Index row = 0;
  Index col = 0;
  for (Index d : shape) {
    for (Index j = 0; j + 1 < d; ++j) {
      a(row + j, col + j) = 1.0;
      a(row + d - 1, col + j) = -1.0;
    }
    row += d;
    col += d - 1;
  }
  return a;
}

bool interior(const Vector& flat, const Shape& shape) {
  Index at = 0;
  for (Index d : shape) {
    for (Index j = 0; j < d; ++j) {
      if (!(flat[at + j] > 0.0)) return false;
    }
    at += d;
  }
  return true;
}

// Newton step for the reduced gradient; falls back to an eigenvalue-floored
// pseudo-inverse when the reduced Hessian is singular.
Vector newton_direction(const Matrix& hess, const Vector& grad) {
  Eigen::FullPivLU<Matrix> lu(hess);
  if (lu.isInvertible() && lu.rcond() > 1e-14) return -lu.solve(grad);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hess + hess.transpose()));
  Vector inv = es.eigenvalues();
  const double floor = 1e-8 * std::max(1.0, inv.cwiseAbs().maxCoeff());
  for (Index i = 0; i < inv.size(); ++i) inv[i] = std::abs(inv[i]) > floor ? 1.0 / inv[i] : 0.0;
  return -(es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose()) * grad;
}

std::optional<ProductPoint> refine(const Objective& obj, const ProductPoint& seed, double tol) {
  const Shape shape = obj.shape();
  const Matrix elim = elimination_matrix(shape);
  Vector flat = seed.flatten();
  auto reduced_grad = [&](const Vector& p) -> Vector { return elim.transpose() * obj.gradient(p); };
  auto gnorm = [&](const Vector& p) { return riemannian_gradient_norm(obj, ProductPoint::from_flat(p, shape)); };

  double current = gnorm(flat);
  int polish = 0;
  for (int iter = 0; iter < 200; ++iter) {
    if (current < tol) {
      // A few extra Newton steps drive the residual to rounding level.
      if (++polish > 3) break;
    }
    const Vector r = reduced_grad(flat);
    if (r.cwiseAbs().maxCoeff() == 0.0) break;
    const Matrix h = elim.transpose() * obj.hessian(flat) * elim;
    const Vector step = elim * newton_direction(h, r);
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      Vector trial = flat + t * step;
      if (!interior(trial, shape)) continue;
      trial = ProductPoint::from_flat(trial, shape).flatten();
      const double g = gnorm(trial);
      if (g < current || (current < tol && g <= tol)) {
        flat = trial;
        current = g;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (!(current < tol)) return std::nullopt;
  return ProductPoint::from_flat(flat, shape);
}

}  // namespace

CriticalSearchResult find_critical_points(const Objective& obj, const std::vector<ProductPoint>& seeds, double tol,
                                          double dedupe) {
  if (!obj.has_hessian()) throw InvalidArgument("find_critical_points: objective needs a Hessian");
  CriticalSearchResult result;
  for (const auto& seed : seeds) {
    auto point = refine(obj, seed, tol);
    if (!point) {
      ++result.failed_seeds;
      continue;
    }
    const Vector flat = point->flatten();
    const bool duplicate = std::any_of(result.entries.begin(), result.entries.end(), [&](const auto& e) {
      return (e.point.flatten() - flat).cwiseAbs().maxCoeff() < dedupe;
    });
    if (duplicate) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> es(riemannian_hessian_matrix(obj, *point), Eigen::EigenvaluesOnly);
    std::vector<double> eigs(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(eigs.begin(), eigs.end());
    CriticalPointEntry entry{*point, eigs, classify(eigs), riemannian_gradient_norm(obj, *point)};
    result.entries.push_back(std::move(entry));
  }
  return result;
}

}  // namespace amwu
