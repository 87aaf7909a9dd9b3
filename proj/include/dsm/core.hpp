#pragma once

// Weighted Hilbert-space vectors, linear maps and monotone operator contracts.
//
// A function on [0,1] (or a point of R^n) is stored as its nodal values on a
// Grid. The Grid carries positive quadrature weights, and every inner product
// and norm in the library is the weighted sum  <u, v> = sum_i w_i u_i v_i.
// Grids are immutable and shared between vectors.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsm/error.hpp"
#include "dsm/rng.hpp"

namespace dsm {

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

class Grid {
 public:
  /// Throws InvalidArgument unless weights is non-empty and strictly positive.
  static GridPtr make(std::vector<double> weights);

  /// All weights equal to one: the Euclidean inner product on R^n.
  static GridPtr euclidean(std::size_t n);

  /// Composite trapezoid weights for n >= 2 uniform nodes on [0,1]:
  /// h/2 at the endpoints and h inside, h = 1/(n-1); multiplied by `scale`.
  static GridPtr trapezoid(std::size_t n, double scale = 1.0);

  [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  /// Sum of the weights (the measure of the domain the grid discretises).
  [[nodiscard]] double measure() const noexcept { return measure_; }

  [[nodiscard]] bool same_as(const Grid& other) const noexcept;

 private:
  explicit Grid(std::vector<double> weights);
  std::vector<double> weights_;
  double measure_ = 0.0;
};

class HilbertVector {
 public:
  /// Empty vector with no grid; only useful as a placeholder.
  HilbertVector() = default;
  HilbertVector(GridPtr grid, std::vector<double> values);

  static HilbertVector zeros(GridPtr grid);
  static HilbertVector constant(GridPtr grid, double value);

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] std::span<const double> weights() const noexcept {
    return grid_ ? grid_->weights() : std::span<const double>{};
  }
  [[nodiscard]] bool empty() const noexcept { return values_.empty(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  [[nodiscard]] double norm() const;
  [[nodiscard]] bool is_zero() const noexcept;

  /// this += alpha * x
  HilbertVector& axpy(double alpha, const HilbertVector& x);

  HilbertVector& operator+=(const HilbertVector& rhs);
  HilbertVector& operator-=(const HilbertVector& rhs);
  HilbertVector& operator*=(double s) noexcept;

  friend HilbertVector operator+(HilbertVector lhs, const HilbertVector& rhs) {
    return lhs += rhs;
  }
  friend HilbertVector operator-(HilbertVector lhs, const HilbertVector& rhs) {
    return lhs -= rhs;
  }
  friend HilbertVector operator*(double s, HilbertVector v) { return v *= s; }
  friend HilbertVector operator*(HilbertVector v, double s) { return v *= s; }
  friend HilbertVector operator-(HilbertVector v) { return v *= -1.0; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Throws GridMismatch if u and v do not live on the same grid.
void require_same_grid(const HilbertVector& u, const HilbertVector& v);

/// sum_i w_i u_i v_i. Throws GridMismatch on differing lengths or weights.
double weighted_inner_product(const HilbertVector& u, const HilbertVector& v);

inline double inner(const HilbertVector& u, const HilbertVector& v) {
  return weighted_inner_product(u, v);
}

/// z = alpha * x + beta * y
HilbertVector lincomb(double alpha, const HilbertVector& x, double beta,
                      const HilbertVector& y);

/// Row-major dense matrix acting on nodal coordinates.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// A bounded linear map on a grid together with its adjoint with respect to
/// the grid's weighted inner product.
class LinearMap {
 public:
  using Fn = std::function<HilbertVector(const HilbertVector&)>;

  LinearMap(GridPtr grid, Fn apply, Fn adjoint_apply);

  static LinearMap zero(GridPtr grid);
  static LinearMap identity(GridPtr grid);

  /// Map whose coordinate matrix is `m`. The adjoint in the weighted inner
  /// product is W^{-1} M^T W.
  static LinearMap from_matrix(GridPtr grid, DenseMatrix m);

  [[nodiscard]] HilbertVector apply(const HilbertVector& u) const;
  [[nodiscard]] HilbertVector adjoint_apply(const HilbertVector& v) const;
  HilbertVector operator()(const HilbertVector& u) const { return apply(u); }

  [[nodiscard]] std::size_t dimension() const noexcept { return grid_->size(); }
  [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }

  /// Coordinate matrix; materialised by applying to unit vectors unless the
  /// map was built from a matrix.
  [[nodiscard]] DenseMatrix to_matrix() const;
  [[nodiscard]] const DenseMatrix* matrix() const noexcept {
    return matrix_ ? matrix_.get() : nullptr;
  }

 private:
  GridPtr grid_;
  Fn apply_;
  Fn adjoint_;
  std::shared_ptr<const DenseMatrix> matrix_;
};

/// Bounds on F and its derivatives over the working ball B(center, radius).
struct OperatorBounds {
  double M1 = 0.0;  ///< sup ||F'(u)||
  double M2 = 0.0;  ///< sup ||F''(u)||
  double radius = 1.0;
  std::optional<HilbertVector> center;  ///< defaults to the origin
};

/// u -> F(u) with optional Frechet derivative access.
class NonlinearOperator {
 public:
  using ApplyFn = std::function<HilbertVector(const HilbertVector&)>;
  using DerivativeFn = std::function<LinearMap(const HilbertVector&)>;

  NonlinearOperator(GridPtr grid, ApplyFn apply, DerivativeFn derivative = {},
                    OperatorBounds bounds = {});

  [[nodiscard]] HilbertVector apply(const HilbertVector& u) const;
  HilbertVector operator()(const HilbertVector& u) const { return apply(u); }

  [[nodiscard]] bool has_derivative() const noexcept {
    return static_cast<bool>(derivative_);
  }
  /// Throws NoDerivative when none was declared.
  [[nodiscard]] LinearMap derivative(const HilbertVector& u) const;

  [[nodiscard]] const OperatorBounds& bounds() const noexcept { return bounds_; }
  [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return grid_->size(); }

  /// w -> F(w + shift), which is monotone whenever F is.
  [[nodiscard]] NonlinearOperator shifted(const HilbertVector& shift) const;

 private:
  GridPtr grid_;
  ApplyFn apply_;
  DerivativeFn derivative_;
  OperatorBounds bounds_;
};

namespace operators {
NonlinearOperator zero(GridPtr grid);
NonlinearOperator identity(GridPtr grid);
NonlinearOperator negated_identity(GridPtr grid);
NonlinearOperator constant(const HilbertVector& value);
NonlinearOperator linear(LinearMap map, double norm_bound);
}  // namespace operators

/// Uniform samples from the weighted-norm ball B(center, radius).
class BallSampler {
 public:
  BallSampler(HilbertVector center, double radius, std::uint64_t seed);

  HilbertVector next();

 private:
  HilbertVector center_;
  double radius_;
  Rng rng_;
};

/// Random unit-norm direction on the grid of `like`.
HilbertVector random_direction(const HilbertVector& like, std::uint64_t seed);

struct MonotonicityReport {
  double min_value = std::numeric_limits<double>::infinity();
  std::size_t worst_pair = 0;
  std::size_t n_pairs = 0;
  std::size_t failures = 0;
  double tol = 0.0;
  bool passed = true;
};

/// min over sampled pairs of <F(u)-F(v), u-v>; passes when min >= -tol.
MonotonicityReport check_monotonicity(const NonlinearOperator& F, BallSampler& sampler,
                                      std::size_t n_pairs, double tol);

/// Solves (A + a I) x = rhs. Dense LU (with one refinement step) for dimension
/// up to kDenseLimit, conjugate gradients on the normal equations above that.
/// Throws SolveFailed if ||(A + aI)x - rhs|| > tol ||rhs||.
HilbertVector solve_shifted(const LinearMap& A, double a, const HilbertVector& rhs,
                            double tol = 1e-10);

inline constexpr std::size_t kDenseLimit = 2000;

/// max over seeded unit directions w of
///   ||F'(u)w - (F(u+hw) - F(u-hw)) / 2h|| / max(||F'(u)w||, 1e-14).
/// Throws NoDerivative.
double fd_derivative_check(const NonlinearOperator& F, const HilbertVector& u,
                           std::size_t n_directions, double h, std::uint64_t seed = 1);

/// Power-iteration estimate of ||A|| (largest singular value).
double estimate_norm(const LinearMap& A, std::size_t iterations = 200,
                     std::uint64_t seed = 7);

/// Power-iteration estimate of the spectral radius of a self-adjoint map.
double estimate_self_adjoint_radius(const LinearMap::Fn& apply, const HilbertVector& like,
                                    std::size_t iterations = 300, std::uint64_t seed = 11);

}  // namespace dsm
