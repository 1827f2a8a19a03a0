#include "amwu/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "amwu/errors.hpp"

namespace amwu {

namespace {

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw DimensionMismatch(os.str());
  }
}

Vector to_vector(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

SimplexPoint::SimplexPoint(Vector weights) : w_(std::move(weights)) {
  if (w_.size() < 1) throw InvalidArgument("SimplexPoint: empty weight vector");
  for (Index i = 0; i < w_.size(); ++i) {
    if (!(w_[i] > 0.0) || !std::isfinite(w_[i])) {
      std::ostringstream os;
      os << "SimplexPoint: weight " << i << " = " << w_[i] << " is not strictly positive";
      throw InvalidArgument(os.str());
    }
  }
  const double sum = w_.sum();
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "SimplexPoint: weights sum to " << sum;
    throw InvalidArgument(os.str());
  }
}

SimplexPoint::SimplexPoint(std::initializer_list<double> weights) : SimplexPoint(to_vector(weights)) {}

SimplexPoint SimplexPoint::normalized(Vector positive) {
  const double sum = positive.sum();
  if (!(sum > 0.0) || !std::isfinite(sum)) throw InvalidArgument("SimplexPoint::normalized: non-positive mass");
  positive /= sum;
  return SimplexPoint(std::move(positive));
}

SimplexPoint SimplexPoint::uniform(Index dim) {
  return SimplexPoint(Vector::Constant(dim, 1.0 / static_cast<double>(dim)));
}

// ---------------------------------------------------------------------------

TangentVector::TangentVector(Vector components) : c_(std::move(components)) {
  const double scale = std::max(1.0, c_.cwiseAbs().sum());
  const double sum = c_.sum();
  if (!std::isfinite(sum) || std::abs(sum) > kSimplexTolerance * scale) {
    std::ostringstream os;
    os << "TangentVector: components sum to " << sum;
    throw InvalidArgument(os.str());
  }
}

TangentVector::TangentVector(std::initializer_list<double> components) : TangentVector(to_vector(components)) {}

TangentVector TangentVector::centered(Vector v) {
  v.array() -= v.mean();
  return TangentVector(std::move(v), Unchecked{});
}

TangentVector TangentVector::zero(Index dim) { return TangentVector(Vector::Zero(dim), Unchecked{}); }

TangentVector TangentVector::operator+(const TangentVector& o) const {
  require_same_dim(dim(), o.dim(), "TangentVector +");
  return TangentVector(c_ + o.c_, Unchecked{});
}

TangentVector TangentVector::operator-(const TangentVector& o) const {
  require_same_dim(dim(), o.dim(), "TangentVector -");
  return TangentVector(c_ - o.c_, Unchecked{});
}

TangentVector TangentVector::operator-() const { return TangentVector(-c_, Unchecked{}); }

TangentVector operator*(double a, const TangentVector& u) { return TangentVector(a * u.c_, TangentVector::Unchecked{}); }

// ---------------------------------------------------------------------------

std::vector<Index> block_offsets(const Shape& shape) {
  std::vector<Index> offsets(shape.size());
  Index at = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    offsets[i] = at;
    at += shape[i];
  }
  return offsets;
}

Index total_dim(const Shape& shape) { return std::accumulate(shape.begin(), shape.end(), Index{0}); }

ProductPoint::ProductPoint(std::vector<SimplexPoint> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw InvalidArgument("ProductPoint: no blocks");
}

ProductPoint::ProductPoint(SimplexPoint single) { blocks_.push_back(std::move(single)); }

ProductPoint ProductPoint::from_flat(const Vector& flat, const Shape& shape) {
  require_same_dim(flat.size(), amwu::total_dim(shape), "ProductPoint::from_flat");
  std::vector<SimplexPoint> blocks;
  blocks.reserve(shape.size());
  Index at = 0;
  for (Index d : shape) {
    blocks.push_back(SimplexPoint::normalized(flat.segment(at, d)));
    at += d;
  }
  return ProductPoint(std::move(blocks));
}

Shape ProductPoint::shape() const {
  Shape s;
  s.reserve(blocks_.size());
  for (const auto& b : blocks_) s.push_back(b.dim());
  return s;
}

Index ProductPoint::total_dim() const { return amwu::total_dim(shape()); }

Vector ProductPoint::flatten() const {
  Vector out(total_dim());
  Index at = 0;
  for (const auto& b : blocks_) {
    out.segment(at, b.dim()) = b.weights();
    at += b.dim();
  }
  return out;
}

ProductTangent ProductTangent::zero(const Shape& shape) {
  std::vector<TangentVector> blocks;
  for (Index d : shape) blocks.push_back(TangentVector::zero(d));
  return ProductTangent(std::move(blocks));
}

ProductTangent ProductTangent::from_flat(const Vector& flat, const Shape& shape) {
  require_same_dim(flat.size(), amwu::total_dim(shape), "ProductTangent::from_flat");
  std::vector<TangentVector> blocks;
  Index at = 0;
  for (Index d : shape) {
    blocks.emplace_back(Vector(flat.segment(at, d)));
    at += d;
  }
  return ProductTangent(std::move(blocks));
}

Shape ProductTangent::shape() const {
  Shape s;
  for (const auto& b : blocks_) s.push_back(b.dim());
  return s;
}

Vector ProductTangent::flatten() const {
  Vector out(total_dim(shape()));
  Index at = 0;
  for (const auto& b : blocks_) {
    out.segment(at, b.dim()) = b.components();
    at += b.dim();
  }
  return out;
}

// ---------------------------------------------------------------------------

TangentVector shahshahani_gradient(const SimplexPoint& x, const Vector& euclidean_grad) {
  require_same_dim(x.dim(), euclidean_grad.size(), "shahshahani_gradient");
  const Vector& w = x.weights();
  const double mean = w.dot(euclidean_grad);
  Vector g = w.cwiseProduct((euclidean_grad.array() - mean).matrix());
  // Sums to zero up to rounding; remove the residue so the invariant is exact
  // to machine precision regardless of the gradient magnitude.
  g.array() -= g.sum() / static_cast<double>(g.size());
  return TangentVector(std::move(g));
}

double shahshahani_inner(const SimplexPoint& x, const Vector& u, const Vector& w) {
  require_same_dim(x.dim(), u.size(), "shahshahani_inner");
  require_same_dim(x.dim(), w.size(), "shahshahani_inner");
  return (u.array() * w.array() / x.weights().array()).sum();
}

double shahshahani_norm(const SimplexPoint& x, const Vector& u) { return std::sqrt(shahshahani_inner(x, u, u)); }

SimplexPoint softmax_reweight(const SimplexPoint& base, const Vector& exponents) {
  require_same_dim(base.dim(), exponents.size(), "softmax_reweight");
  if (!exponents.allFinite()) throw InvalidArgument("softmax_reweight: non-finite exponent");
  const double shift = exponents.maxCoeff();
  Vector w = base.weights().cwiseProduct((exponents.array() - shift).exp().matrix());
  for (Index i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) {
      std::ostringstream os;
      os << "softmax_reweight: weight " << i << " underflowed to zero";
      throw BoundaryReached(os.str());
    }
  }
  w /= w.sum();
  return SimplexPoint(std::move(w));
}

SimplexPoint exp_map(const SimplexPoint& x, const TangentVector& u) {
  return softmax_reweight(x, u.components());
}

TangentVector log_map(const SimplexPoint& x, const SimplexPoint& y) {
  require_same_dim(x.dim(), y.dim(), "log_map");
  const Vector log_ratio = (y.weights().array().log() - x.weights().array().log()).matrix();
  // ln S = (1/d) sum_i ln(x_i / y_i)
  const double log_s = -log_ratio.mean();
  Vector u = (log_ratio.array() + log_s).matrix();
  return TangentVector(std::move(u));
}

Vector mwu_factors(const SimplexPoint& x, const Vector& euclidean_grad, double alpha) {
  require_same_dim(x.dim(), euclidean_grad.size(), "mwu_factors");
  const double denom = 1.0 - alpha * x.weights().dot(euclidean_grad);
  if (!(denom > 0.0)) {
    std::ostringstream os;
    os << "MWU denominator 1 - alpha <x, grad> = " << denom << " is not positive (alpha = " << alpha << ")";
    throw StepTooLarge(os.str());
  }
  Vector factors(x.dim());
  for (Index i = 0; i < x.dim(); ++i) {
    const double num = 1.0 - alpha * euclidean_grad[i];
    if (!(num > 0.0)) {
      std::ostringstream os;
      os << "MWU factor 1 - alpha * grad[" << i << "] = " << num << " is not positive (alpha = " << alpha << ")";
      throw StepTooLarge(os.str());
    }
    factors[i] = num / denom;
  }
  return factors;
}

Vector projected_displacement(const SimplexPoint& x, const Vector& euclidean_grad, double alpha) {
  const Vector factors = mwu_factors(x, euclidean_grad, alpha);
  return x.weights().cwiseProduct((factors.array() - 1.0).matrix());
}

SimplexPoint mwu_retract(const SimplexPoint& x, const Vector& euclidean_grad, double alpha) {
  const Vector factors = mwu_factors(x, euclidean_grad, alpha);
  Vector w = x.weights().cwiseProduct(factors);
  for (Index i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) throw BoundaryReached("mwu_retract: weight underflowed to zero");
  }
  w /= w.sum();
  return SimplexPoint(std::move(w));
}

// ---------------------------------------------------------------------------

namespace {

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (a != b) throw DimensionMismatch(std::string(what) + ": block shape mismatch");
}

}  // namespace

ProductTangent product_gradient(const ProductPoint& x, const Vector& joint_grad) {
  require_same_dim(x.total_dim(), joint_grad.size(), "product_gradient");
  std::vector<TangentVector> blocks;
  Index at = 0;
  for (const auto& b : x.blocks()) {
    blocks.push_back(shahshahani_gradient(b, joint_grad.segment(at, b.dim())));
    at += b.dim();
  }
  return ProductTangent(std::move(blocks));
}

ProductPoint product_exp(const ProductPoint& x, const ProductTangent& u) {
  require_same_shape(x.shape(), u.shape(), "product_exp");
  std::vector<SimplexPoint> blocks;
  for (std::size_t i = 0; i < x.num_blocks(); ++i) blocks.push_back(exp_map(x.block(i), u.block(i)));
  return ProductPoint(std::move(blocks));
}

ProductTangent product_log(const ProductPoint& x, const ProductPoint& y) {
  require_same_shape(x.shape(), y.shape(), "product_log");
  std::vector<TangentVector> blocks;
  for (std::size_t i = 0; i < x.num_blocks(); ++i) blocks.push_back(log_map(x.block(i), y.block(i)));
  return ProductTangent(std::move(blocks));
}

ProductPoint product_mwu_retract(const ProductPoint& x, const Vector& joint_grad, double alpha) {
  require_same_dim(x.total_dim(), joint_grad.size(), "product_mwu_retract");
  std::vector<SimplexPoint> blocks;
  Index at = 0;
  for (const auto& b : x.blocks()) {
    blocks.push_back(mwu_retract(b, joint_grad.segment(at, b.dim()), alpha));
    at += b.dim();
  }
  return ProductPoint(std::move(blocks));
}

double product_norm(const ProductPoint& x, const ProductTangent& u) {
  require_same_shape(x.shape(), u.shape(), "product_norm");
  double sq = 0.0;
  for (std::size_t i = 0; i < x.num_blocks(); ++i) {
    sq += shahshahani_inner(x.block(i), u.block(i).components(), u.block(i).components());
  }
  return std::sqrt(sq);
}

ProductTangent operator+(const ProductTangent& a, const ProductTangent& b) {
  require_same_shape(a.shape(), b.shape(), "ProductTangent +");
  std::vector<TangentVector> blocks;
  for (std::size_t i = 0; i < a.num_blocks(); ++i) blocks.push_back(a.block(i) + b.block(i));
  return ProductTangent(std::move(blocks));
}

ProductTangent operator-(const ProductTangent& a, const ProductTangent& b) {
  require_same_shape(a.shape(), b.shape(), "ProductTangent -");
  std::vector<TangentVector> blocks;
  for (std::size_t i = 0; i < a.num_blocks(); ++i) blocks.push_back(a.block(i) - b.block(i));
  return ProductTangent(std::move(blocks));
}

ProductTangent operator*(double a, const ProductTangent& u) {
  std::vector<TangentVector> blocks;
  for (const auto& b : u.blocks()) blocks.push_back(a * b);
  return ProductTangent(std::move(blocks));
}

double max_abs_difference(const ProductPoint& a, const ProductPoint& b) {
  require_same_shape(a.shape(), b.shape(), "max_abs_difference");
  return (a.flatten() - b.flatten()).cwiseAbs().maxCoeff();
}

}  // namespace amwu

namespace amwu {

Matrix tangent_basis(Index dim) {
  if (dim < 1) throw InvalidArgument("tangent_basis: dimension must be positive");
  Matrix basis = Matrix::Zero(dim, dim - 1);
  for (Index k = 1; k < dim; ++k) {
    const double kd = static_cast<double>(k);
    const double norm = std::sqrt(kd * (kd + 1.0));
    for (Index i = 0; i < k; ++i) basis(i, k - 1) = 1.0 / norm;
    basis(k, k - 1) = -kd / norm;
  }
  return basis;
}

Matrix metric_orthonormal_basis(const SimplexPoint& x) {
  const Index d = x.dim();
  const Vector root = x.weights().array().sqrt().matrix();  // unit vector
  // Householder reflector sending root to -sign * e_last; its other columns
  // span root's orthogonal complement.
  Vector w = root;
  const double sign = root[d - 1] >= 0.0 ? 1.0 : -1.0;
  w[d - 1] += sign;
  const Matrix reflector = Matrix::Identity(d, d) - 2.0 * w * w.transpose() / w.squaredNorm();
  const Matrix complement = reflector.leftCols(d - 1);
  return root.asDiagonal() * complement;
}

namespace {

template <typename BlockFn>
Matrix block_diagonal(const Shape& shape, BlockFn&& fn) {
  Index rows = 0;
  Index cols = 0;
  std::vector<Matrix> parts;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    parts.push_back(fn(i));
    rows += parts.back().rows();
    cols += parts.back().cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Index r = 0;
  Index c = 0;
  for (const auto& p : parts) {
    out.block(r, c, p.rows(), p.cols()) = p;
    r += p.rows();
    c += p.cols();
  }
  return out;
}

}  // namespace

Matrix tangent_basis(const Shape& shape) {
  return block_diagonal(shape, [&](std::size_t i) { return tangent_basis(shape[i]); });
}

Matrix metric_orthonormal_basis(const ProductPoint& x) {
  return block_diagonal(x.shape(), [&](std::size_t i) { return metric_orthonormal_basis(x.block(i)); });
}

Matrix exp_differential(const ProductPoint& x) {
  return block_diagonal(x.shape(), [&](std::size_t i) {
    const Vector& w = x.block(i).weights();
    Matrix q = Matrix(w.asDiagonal()) - w * w.transpose();
    return q;
  });
}

}  // namespace amwu
