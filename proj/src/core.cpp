#include "dsm/core.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dsm/kernels.hpp"

namespace dsm {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SolveFailed: return "SolveFailed";
    case ErrorKind::NoDerivative: return "NoDerivative";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::ConstraintViolated: return "ConstraintViolated";
    case ErrorKind::InvalidStepSize: return "InvalidStepSize";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::BoundViolated: return "BoundViolated";
    case ErrorKind::DegenerateNoise: return "DegenerateNoise";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(std::vector<double> weights) : weights_(std::move(weights)) {
  measure_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

GridPtr Grid::make(std::vector<double> weights) {
  if (weights.empty()) throw Error(ErrorKind::InvalidArgument, "grid must be non-empty");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw Error(ErrorKind::InvalidArgument, "grid weights must be positive and finite");
  }
  return GridPtr(new Grid(std::move(weights)));
}

GridPtr Grid::euclidean(std::size_t n) { return make(std::vector<double>(n, 1.0)); }

GridPtr Grid::trapezoid(std::size_t n, double scale) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "trapezoid grid needs n >= 2");
  const double h = 1.0 / static_cast<double>(n - 1);
  std::vector<double> w(n, h * scale);
  w.front() = w.back() = 0.5 * h * scale;
  return make(std::move(w));
}

bool Grid::same_as(const Grid& other) const noexcept {
  return this == &other || weights_ == other.weights_;
}

// ---------------------------------------------------------------------------
// HilbertVector

HilbertVector::HilbertVector(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw Error(ErrorKind::InvalidArgument, "vector without grid");
  if (values_.size() != grid_->size())
    throw Error(ErrorKind::GridMismatch, "value count differs from grid size");
}

HilbertVector HilbertVector::zeros(GridPtr grid) {
  const std::size_t n = grid->size();
  return {std::move(grid), std::vector<double>(n, 0.0)};
}

HilbertVector HilbertVector::constant(GridPtr grid, double value) {
  const std::size_t n = grid->size();
  return {std::move(grid), std::vector<double>(n, value)};
}

double HilbertVector::norm() const {
  return std::sqrt(std::max(0.0, kernels::weighted_dot(weights(), values_, values_)));
}

bool HilbertVector::is_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return x == 0.0; });
}

HilbertVector& HilbertVector::axpy(double alpha, const HilbertVector& x) {
  require_same_grid(*this, x);
  kernels::axpy(alpha, x.values_, values_);
  return *this;
}

HilbertVector& HilbertVector::operator+=(const HilbertVector& rhs) { return axpy(1.0, rhs); }
HilbertVector& HilbertVector::operator-=(const HilbertVector& rhs) { return axpy(-1.0, rhs); }

HilbertVector& HilbertVector::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

void require_same_grid(const HilbertVector& u, const HilbertVector& v) {
  if (u.size() != v.size())
    throw Error(ErrorKind::GridMismatch, "vector lengths differ");
  if (!u.grid() || !v.grid()) throw Error(ErrorKind::GridMismatch, "vector without grid");
  if (!u.grid()->same_as(*v.grid()))
    throw Error(ErrorKind::GridMismatch, "vector weights differ");
}

double weighted_inner_product(const HilbertVector& u, const HilbertVector& v) {
  require_same_grid(u, v);
  return kernels::weighted_dot(u.weights(), u.values(), v.values());
}

HilbertVector lincomb(double alpha, const HilbertVector& x, double beta,
                      const HilbertVector& y) {
  require_same_grid(x, y);
  HilbertVector z = HilbertVector::zeros(x.grid());
  kernels::lincomb(alpha, x.values(), beta, y.values(), z.values());
  return z;
}

// ---------------------------------------------------------------------------
// LinearMap

LinearMap::LinearMap(GridPtr grid, Fn apply, Fn adjoint_apply)
    : grid_(std::move(grid)), apply_(std::move(apply)), adjoint_(std::move(adjoint_apply)) {}

LinearMap LinearMap::zero(GridPtr grid) {
  DenseMatrix m(grid->size(), grid->size());
  return from_matrix(std::move(grid), std::move(m));
}

LinearMap LinearMap::identity(GridPtr grid) {
  DenseMatrix m(grid->size(), grid->size());
  for (std::size_t i = 0; i < m.rows; ++i) m(i, i) = 1.0;
  return from_matrix(std::move(grid), std::move(m));
}

LinearMap LinearMap::from_matrix(GridPtr grid, DenseMatrix m) {
  const std::size_t n = grid->size();
  if (m.rows != n || m.cols != n)
    throw Error(ErrorKind::GridMismatch, "matrix shape differs from grid size");
  auto mat = std::make_shared<const DenseMatrix>(std::move(m));
  auto apply = [mat](const HilbertVector& u) {
    HilbertVector y = HilbertVector::zeros(u.grid());
    kernels::gemv(mat->data, mat->rows, mat->cols, u.values(), y.values());
    return y;
  };
  auto adjoint = [mat](const HilbertVector& v) {
    // <Mu, v>_W = u^T M^T W v = <u, W^{-1} M^T W v>_W
    const auto w = v.weights();
    std::vector<double> wv(v.size());
    for (std::size_t i = 0; i < wv.size(); ++i) wv[i] = w[i] * v[i];
    HilbertVector y = HilbertVector::zeros(v.grid());
    kernels::gemv_t(mat->data, mat->rows, mat->cols, wv, y.values());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] /= w[i];
    return y;
  };
  LinearMap map(std::move(grid), apply, adjoint);
  map.matrix_ = std::move(mat);
  return map;
}

HilbertVector LinearMap::apply(const HilbertVector& u) const {
  if (u.size() != dimension() || !u.grid()->same_as(*grid_))
    throw Error(ErrorKind::GridMismatch, "linear map applied off its grid");
  return apply_(u);
}

HilbertVector LinearMap::adjoint_apply(const HilbertVector& v) const {
  if (v.size() != dimension() || !v.grid()->same_as(*grid_))
    throw Error(ErrorKind::GridMismatch, "adjoint applied off its grid");
  return adjoint_(v);
}

DenseMatrix LinearMap::to_matrix() const {
  if (matrix_) return *matrix_;
  const std::size_t n = dimension();
  DenseMatrix m(n, n);
  HilbertVector e = HilbertVector::zeros(grid_);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const HilbertVector col = apply_(e);
    for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
    e[j] = 0.0;
  }
  return m;
}

// ---------------------------------------------------------------------------
// NonlinearOperator

NonlinearOperator::NonlinearOperator(GridPtr grid, ApplyFn apply, DerivativeFn derivative,
                                     OperatorBounds bounds)
    : grid_(std::move(grid)),
      apply_(std::move(apply)),
      derivative_(std::move(derivative)),
      bounds_(std::move(bounds)) {}

HilbertVector NonlinearOperator::apply(const HilbertVector& u) const {
  if (u.size() != dimension() || !u.grid()->same_as(*grid_))
    throw Error(ErrorKind::GridMismatch, "operator applied off its grid");
  return apply_(u);
}

LinearMap NonlinearOperator::derivative(const HilbertVector& u) const {
  if (!derivative_) throw Error(ErrorKind::NoDerivative, "operator declares no derivative");
  if (u.size() != dimension() || !u.grid()->same_as(*grid_))
    throw Error(ErrorKind::GridMismatch, "derivative requested off the grid");
  return derivative_(u);
}

NonlinearOperator NonlinearOperator::shifted(const HilbertVector& shift) const {
  require_same_grid(HilbertVector::zeros(grid_), shift);
  auto base = std::make_shared<const NonlinearOperator>(*this);
  DerivativeFn deriv;
  if (derivative_) {
    deriv = [base, shift](const HilbertVector& w) { return base->derivative(w + shift); };
  }
  OperatorBounds b = bounds_;
  if (b.center) b.center = *b.center - shift;
  else b.center = -shift;
  return NonlinearOperator(
      grid_, [base, shift](const HilbertVector& w) { return base->apply(w + shift); },
      std::move(deriv), std::move(b));
}

namespace operators {

NonlinearOperator zero(GridPtr grid) {
  return NonlinearOperator(
      grid, [](const HilbertVector& u) { return HilbertVector::zeros(u.grid()); },
      [](const HilbertVector& u) { return LinearMap::zero(u.grid()); }, OperatorBounds{});
}

NonlinearOperator identity(GridPtr grid) {
  OperatorBounds b;
  b.M1 = 1.0;
  return NonlinearOperator(
      grid, [](const HilbertVector& u) { return u; },
      [](const HilbertVector& u) { return LinearMap::identity(u.grid()); }, b);
}

NonlinearOperator negated_identity(GridPtr grid) {
  OperatorBounds b;
  b.M1 = 1.0;
  return NonlinearOperator(
      grid, [](const HilbertVector& u) { return -u; },
      [](const HilbertVector& u) {
        DenseMatrix m(u.size(), u.size());
        for (std::size_t i = 0; i < m.rows; ++i) m(i, i) = -1.0;
        return LinearMap::from_matrix(u.grid(), std::move(m));
      },
      b);
}

NonlinearOperator constant(const HilbertVector& value) {
  return NonlinearOperator(
      value.grid(), [value](const HilbertVector&) { return value; },
      [](const HilbertVector& u) { return LinearMap::zero(u.grid()); }, OperatorBounds{});
}

NonlinearOperator linear(LinearMap map, double norm_bound) {
  OperatorBounds b;
  b.M1 = norm_bound;
  auto shared = std::make_shared<const LinearMap>(std::move(map));
  return NonlinearOperator(
      shared->grid(), [shared](const HilbertVector& u) { return shared->apply(u); },
      [shared](const HilbertVector&) { return *shared; }, b);
}

}  // namespace operators

// ---------------------------------------------------------------------------
// Sampling

BallSampler::BallSampler(HilbertVector center, double radius, std::uint64_t seed)
    : center_(std::move(center)), radius_(radius), rng_(seed) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "ball radius must be positive");
}

HilbertVector BallSampler::next() {
  // Uniform in the Euclidean ball of z = W^{1/2} v, mapped back to v.
  const std::size_t n = center_.size();
  const auto w = center_.weights();
  std::vector<double> z(n);
  double zz = 0.0;
  do {
    zz = 0.0;
    for (double& zi : z) {
      zi = rng_.normal();
      zz += zi * zi;
    }
  } while (zz == 0.0);
  const double r = radius_ * std::pow(rng_.uniform(), 1.0 / static_cast<double>(n));
  const double s = r / std::sqrt(zz);
  HilbertVector v = center_;
  for (std::size_t i = 0; i < n; ++i) v[i] += s * z[i] / std::sqrt(w[i]);
  return v;
}

HilbertVector random_direction(const HilbertVector& like, std::uint64_t seed) {
  Rng rng(seed);
  HilbertVector d = HilbertVector::zeros(like.grid());
  for (double& x : d.values()) x = rng.normal();
  const double n = d.norm();
  if (n > 0.0) d *= 1.0 / n;
  return d;
}

MonotonicityReport check_monotonicity(const NonlinearOperator& F, BallSampler& sampler,
                                      std::size_t n_pairs, double tol) {
  if (n_pairs == 0) throw Error(ErrorKind::InvalidArgument, "n_pairs must be >= 1");
  MonotonicityReport rep;
  rep.n_pairs = n_pairs;
  rep.tol = tol;
  for (std::size_t k = 0; k < n_pairs; ++k) {
    const HilbertVector u = sampler.next();
    const HilbertVector v = sampler.next();
    const double value = inner(F(u) - F(v), u - v);
    if (value < -tol) ++rep.failures;
    if (value < rep.min_value) {
      rep.min_value = value;
      rep.worst_pair = k;
    }
  }
  rep.passed = rep.failures == 0;
  return rep;
}

// ---------------------------------------------------------------------------
// Shifted solves

namespace {

HilbertVector shifted_apply(const LinearMap& A, double a, const HilbertVector& x) {
  HilbertVector y = A.apply(x);
  y.axpy(a, x);
  return y;
}

HilbertVector solve_dense(const LinearMap& A, double a, const HilbertVector& rhs) {
  const std::size_t n = A.dimension();
  const DenseMatrix local = A.matrix() ? DenseMatrix{} : A.to_matrix();
  const DenseMatrix& m = A.matrix() ? *A.matrix() : local;
  Eigen::MatrixXd M(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) M(i, j) = m(i, j);
  M.diagonal().array() += a;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  Eigen::Map<const Eigen::VectorXd> b(rhs.values().data(), n);
  Eigen::VectorXd x = lu.solve(b);
  Eigen::VectorXd r = b - M * x;
  x += lu.solve(r);
  return HilbertVector(rhs.grid(), std::vector<double>(x.data(), x.data() + n));
}

// CG on (A+aI)^*(A+aI) x = (A+aI)^* rhs in the weighted inner product.
HilbertVector solve_cgne(const LinearMap& A, double a, const HilbertVector& rhs,
                         double tol) {
  auto op = [&](const HilbertVector& x) { return shifted_apply(A, a, x); };
  auto adj = [&](const HilbertVector& x) {
    HilbertVector y = A.adjoint_apply(x);
    y.axpy(a, x);
    return y;
  };
  HilbertVector x = HilbertVector::zeros(rhs.grid());
  HilbertVector r = rhs;
  HilbertVector z = adj(r);
  HilbertVector p = z;
  double zz = inner(z, z);
  const double target = tol * rhs.norm();
  const std::size_t budget = 10 * A.dimension() + 100;
  for (std::size_t k = 0; k < budget && r.norm() > target; ++k) {
    const HilbertVector q = op(p);
    const double qq = inner(q, q);
    if (qq <= 0.0) break;
    const double alpha = zz / qq;
    x.axpy(alpha, p);
    r.axpy(-alpha, q);
    z = adj(r);
    const double zz_new = inner(z, z);
    p = lincomb(1.0, z, zz_new / zz, p);
    zz = zz_new;
  }
  return x;
}

}  // namespace

HilbertVector solve_shifted(const LinearMap& A, double a, const HilbertVector& rhs,
                            double tol) {
  if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "shift a must be positive");
  if (rhs.size() != A.dimension() || !rhs.grid()->same_as(*A.grid()))
    throw Error(ErrorKind::GridMismatch, "rhs off the map's grid");
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return HilbertVector::zeros(rhs.grid());

  HilbertVector x = A.dimension() <= kDenseLimit ? solve_dense(A, a, rhs)
                                                 : solve_cgne(A, a, rhs, tol);
  const double res = (shifted_apply(A, a, x) - rhs).norm();
  bool finite = std::all_of(x.values().begin(), x.values().end(),
                            [](double v) { return std::isfinite(v); });
  if (!finite || !(res <= tol * rhs_norm)) {
    std::ostringstream os;
    os << "relative residual " << res / rhs_norm << " exceeds " << tol << " at a=" << a;
    throw Error(ErrorKind::SolveFailed, os.str());
  }
  return x;
}

double fd_derivative_check(const NonlinearOperator& F, const HilbertVector& u,
                           std::size_t n_directions, double h, std::uint64_t seed) {
  if (!F.has_derivative()) throw Error(ErrorKind::NoDerivative, "fd check needs F'");
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "fd step must be positive");
  constexpr double kFloor = 1e-14;
  const LinearMap J = F.derivative(u);
  double worst = 0.0;
  for (std::size_t k = 0; k < n_directions; ++k) {
    const HilbertVector w = random_direction(u, seed + 0x9e37 * (k + 1));
    HilbertVector up = u;
    up.axpy(h, w);
    HilbertVector um = u;
    um.axpy(-h, w);
    // Differencing against the realized step up - um, not 2 h w, removes the
    // rounding of u +- h w, so linear maps check exactly at any h.
    const HilbertVector jw = J.apply(up - um);
    const HilbertVector fd = F(up) - F(um);
    const double err = (jw - fd).norm() / std::max(jw.norm(), 2.0 * h * kFloor);
    worst = std::max(worst, err);
  }
  return worst;
}

double estimate_self_adjoint_radius(const LinearMap::Fn& apply, const HilbertVector& like,
                                    std::size_t iterations, std::uint64_t seed) {
  HilbertVector x = random_direction(like, seed);
  double lambda = 0.0;
  for (std::size_t k = 0; k < iterations; ++k) {
    HilbertVector y = apply(x);
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    lambda = ny;
    x = std::move(y);
    x *= 1.0 / ny;
  }
  return lambda;
}

double estimate_norm(const LinearMap& A, std::size_t iterations, std::uint64_t seed) {
  HilbertVector like = HilbertVector::zeros(A.grid());
  const double r = estimate_self_adjoint_radius(
      [&A](const HilbertVector& x) { return A.adjoint_apply(A.apply(x)); }, like,
      iterations, seed);
  return std::sqrt(r);
}

}  // namespace dsm
