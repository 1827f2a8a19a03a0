#pragma once

// Shahshahani geometry of the positive simplex and of products of simplices.
//
// The tangent space at every point of the open simplex is identified with the
// hyperplane {u : sum_i u_i = 0}. The exponential map is the softmax
// reweighting Exp_x(u)_i = x_i e^{u_i} / sum_j x_j e^{u_j}; its inverse is the
// centered log ratio. The MWU update is the retraction of the projected
// gradient step.

#include <Eigen/Core>

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace amwu {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Tolerance on sum_i x_i = 1 for points and sum_i u_i = 0 for tangents.
inline constexpr double kSimplexTolerance = 1e-12;

/// A strictly positive weight vector summing to one.
class SimplexPoint {
 public:
  /// Validates positivity and |sum - 1| <= kSimplexTolerance.
  explicit SimplexPoint(Vector weights);
  SimplexPoint(std::initializer_list<double> weights);

  /// Divides a strictly positive vector by its sum.
  static SimplexPoint normalized(Vector positive);
  static SimplexPoint uniform(Index dim);

  const Vector& weights() const noexcept { return w_; }
  Index dim() const noexcept { return w_.size(); }
  double operator[](Index i) const { return w_[i]; }

 private:
  Vector w_;
};

/// A vector whose components sum to zero.
class TangentVector {
 public:
  /// Validates |sum| <= kSimplexTolerance * max(1, |u|_1).
  explicit TangentVector(Vector components);
  TangentVector(std::initializer_list<double> components);

  /// Subtracts the mean, projecting any vector onto the sum-zero hyperplane.
  static TangentVector centered(Vector v);
  static TangentVector zero(Index dim);

  const Vector& components() const noexcept { return c_; }
  Index dim() const noexcept { return c_.size(); }
  double operator[](Index i) const { return c_[i]; }

  TangentVector operator+(const TangentVector& o) const;
  TangentVector operator-(const TangentVector& o) const;
  TangentVector operator-() const;
  friend TangentVector operator*(double a, const TangentVector& u);

 private:
  struct Unchecked {};
  TangentVector(Vector components, Unchecked) : c_(std::move(components)) {}
  Vector c_;
};

using Shape = std::vector<Index>;

/// One simplex point per agent.
class ProductPoint {
 public:
  explicit ProductPoint(std::vector<SimplexPoint> blocks);
  ProductPoint(SimplexPoint single);  // NOLINT(google-explicit-constructor)

  /// Splits a joint coordinate vector by `shape` and normalizes each block.
  static ProductPoint from_flat(const Vector& flat, const Shape& shape);

  const std::vector<SimplexPoint>& blocks() const noexcept { return blocks_; }
  const SimplexPoint& block(std::size_t i) const { return blocks_.at(i); }
  std::size_t num_blocks() const noexcept { return blocks_.size(); }
  Shape shape() const;
  Index total_dim() const;
  Vector flatten() const;

 private:
  std::vector<SimplexPoint> blocks_;
};

class ProductTangent {
 public:
  explicit ProductTangent(std::vector<TangentVector> blocks) : blocks_(std::move(blocks)) {}
  static ProductTangent zero(const Shape& shape);
  /// Splits a joint vector by `shape`; each block must already sum to zero.
  static ProductTangent from_flat(const Vector& flat, const Shape& shape);

  const std::vector<TangentVector>& blocks() const noexcept { return blocks_; }
  const TangentVector& block(std::size_t i) const { return blocks_.at(i); }
  std::size_t num_blocks() const noexcept { return blocks_.size(); }
  Shape shape() const;
  Vector flatten() const;

 private:
  std::vector<TangentVector> blocks_;
};

/// Offsets of each block inside the flattened joint vector.
std::vector<Index> block_offsets(const Shape& shape);
Index total_dim(const Shape& shape);

// ---------------------------------------------------------------------------
// Single simplex.

/// Riemannian gradient in tangent form: x_i (g_i - sum_j x_j g_j).
TangentVector shahshahani_gradient(const SimplexPoint& x, const Vector& euclidean_grad);

double shahshahani_inner(const SimplexPoint& x, const Vector& u, const Vector& w);
double shahshahani_norm(const SimplexPoint& x, const Vector& u);

/// Reweights `base` by e^{exponents} and renormalizes. Shift invariant in the
/// exponents; the maximum is subtracted before exponentiating.
SimplexPoint softmax_reweight(const SimplexPoint& base, const Vector& exponents);

SimplexPoint exp_map(const SimplexPoint& x, const TangentVector& u);

/// u_i = ln(S y_i / x_i) with S = (prod_i x_i / y_i)^{1/d}.
TangentVector log_map(const SimplexPoint& x, const SimplexPoint& y);

/// The MWU ratio (1 - alpha g_i) / (1 - alpha sum_j x_j g_j) for each i.
/// Throws StepTooLarge when a numerator or the denominator is not positive.
Vector mwu_factors(const SimplexPoint& x, const Vector& euclidean_grad, double alpha);

/// V(x) - x, where V(x) is x - alpha * grad_N f(x) pulled back radially onto
/// the simplex. This is the projected step whose retraction is MWU.
Vector projected_displacement(const SimplexPoint& x, const Vector& euclidean_grad, double alpha);

/// x_i (1 - alpha g_i) / (1 - alpha sum_j x_j g_j), renormalized.
SimplexPoint mwu_retract(const SimplexPoint& x, const Vector& euclidean_grad, double alpha);

// ---------------------------------------------------------------------------
// Products, block by block. Joint vectors are laid out block after block.

ProductTangent product_gradient(const ProductPoint& x, const Vector& joint_grad);
ProductPoint product_exp(const ProductPoint& x, const ProductTangent& u);
ProductTangent product_log(const ProductPoint& x, const ProductPoint& y);
ProductPoint product_mwu_retract(const ProductPoint& x, const Vector& joint_grad, double alpha);
double product_norm(const ProductPoint& x, const ProductTangent& u);

ProductTangent operator+(const ProductTangent& a, const ProductTangent& b);
ProductTangent operator-(const ProductTangent& a, const ProductTangent& b);
ProductTangent operator*(double a, const ProductTangent& u);

/// Largest |a_i - b_i| over all coordinates of equally shaped points.
double max_abs_difference(const ProductPoint& a, const ProductPoint& b);

}  // namespace amwu

namespace amwu {

/// Euclidean-orthonormal basis of the sum-zero hyperplane in R^d (d x (d-1),
/// Helmert columns).
Matrix tangent_basis(Index dim);

/// Basis B of the tangent space, orthonormal for the Shahshahani metric at x:
/// B^T diag(1/x) B = I and every column sums to zero.
Matrix metric_orthonormal_basis(const SimplexPoint& x);

/// Block-diagonal versions over a product.
Matrix tangent_basis(const Shape& shape);
Matrix metric_orthonormal_basis(const ProductPoint& x);

/// Block-diagonal diag(x) - x x^T: the differential of Exp at 0, and the map
/// taking a Euclidean gradient to its tangent-form Shahshahani gradient.
Matrix exp_differential(const ProductPoint& x);

}  // namespace amwu
