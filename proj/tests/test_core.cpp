#include <gtest/gtest.h>

#include <cmath>

#include "dsm/bench.hpp"
#include "dsm/core.hpp"

namespace {

using namespace dsm;

TEST(Grid, RejectsEmptyAndNonPositiveWeights) {
  EXPECT_THROW(Grid::make({}), Error);
  EXPECT_THROW(Grid::make({1.0, 0.0}), Error);
  EXPECT_THROW(Grid::make({1.0, -1.0}), Error);
}

TEST(Grid, TrapezoidWeights) {
  const GridPtr g = Grid::trapezoid(5);
  ASSERT_EQ(g->size(), 5u);
  EXPECT_DOUBLE_EQ(g->weights()[0], 0.125);
  EXPECT_DOUBLE_EQ(g->weights()[2], 0.25);
  EXPECT_NEAR(g->measure(), 1.0, 1e-15);
  EXPECT_NEAR(Grid::trapezoid(5, 4.0)->measure(), 4.0, 1e-15);
}

TEST(InnerProduct, ConstantOnTwoNodes) {
  const GridPtr g = Grid::make({0.5, 0.5});
  const HilbertVector u(g, {1.0, 1.0});
  EXPECT_DOUBLE_EQ(weighted_inner_product(u, u), 1.0);
}

TEST(InnerProduct, ZeroVector) {
  const GridPtr g = Grid::trapezoid(7);
  HilbertVector u(g, {1, 2, 3, 4, 5, 6, 7});
  EXPECT_EQ(weighted_inner_product(u, HilbertVector::zeros(g)), 0.0);
}

TEST(InnerProduct, TrapezoidIntegralOfXSquared) {
  const std::size_t n = 51;
  const GridPtr g = Grid::trapezoid(n);
  HilbertVector u = HilbertVector::zeros(g);
  for (std::size_t i = 0; i < n; ++i) u[i] = static_cast<double>(i) / (n - 1);
  // Trapezoid error for x^2 is h^2/6.
  const double h = 1.0 / (n - 1);
  EXPECT_NEAR(inner(u, u), 1.0 / 3.0, 1e-3);
  EXPECT_NEAR(inner(u, u), 1.0 / 3.0 + h * h / 6.0, 1e-14);
}

TEST(InnerProduct, GridMismatchThrows) {
  const HilbertVector u = HilbertVector::zeros(Grid::trapezoid(4));
  const HilbertVector v = HilbertVector::zeros(Grid::euclidean(4));
  const HilbertVector w = HilbertVector::zeros(Grid::euclidean(5));
  EXPECT_THROW((void)inner(u, v), Error);
  EXPECT_THROW((void)inner(v, w), Error);
  try {
    (void)inner(v, w);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GridMismatch);
  }
}

TEST(InnerProduct, SymmetricBilinearProperty) {
  const GridPtr g = Grid::trapezoid(33, 3.0);
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const HilbertVector u = random_direction(HilbertVector::zeros(g), s);
    const HilbertVector v = random_direction(HilbertVector::zeros(g), s + 100);
    const HilbertVector w = random_direction(HilbertVector::zeros(g), s + 200);
    EXPECT_NEAR(inner(u, v), inner(v, u), 1e-15);
    EXPECT_NEAR(inner(lincomb(2.0, u, -3.0, w), v), 2.0 * inner(u, v) - 3.0 * inner(w, v),
                1e-14);
    EXPECT_NEAR(u.norm(), 1.0, 1e-14);
    // Cauchy-Schwarz.
    EXPECT_LE(std::abs(inner(u, v)), u.norm() * v.norm() + 1e-15);
  }
}

TEST(LinearMap, FromMatrixAdjointIsWeightedTranspose) {
  const GridPtr g = Grid::make({0.5, 1.0, 2.0});
  DenseMatrix m(3, 3);
  double k = 1.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = k++ * (i == j ? 1.0 : -0.5);
  const LinearMap A = LinearMap::from_matrix(g, m);
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const HilbertVector u = random_direction(HilbertVector::zeros(g), s);
    const HilbertVector v = random_direction(HilbertVector::zeros(g), s + 50);
    EXPECT_NEAR(inner(A(u), v), inner(u, A.adjoint_apply(v)), 1e-14);
  }
  const DenseMatrix back = A.to_matrix();
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(back.data[i], m.data[i]);
}

TEST(Monotonicity, IdentityPasses) {
  const GridPtr g = Grid::euclidean(4);
  BallSampler sampler(HilbertVector::zeros(g), 2.0, 5);
  const auto r = check_monotonicity(operators::identity(g), sampler, 100, 0.0);
  EXPECT_TRUE(r.passed);
  EXPECT_GE(r.min_value, 0.0);
  EXPECT_EQ(r.n_pairs, 100u);
}

TEST(Monotonicity, NegatedIdentityFailsWithMinusSquaredDistance) {
  const GridPtr g = Grid::euclidean(3);
  BallSampler sampler(HilbertVector::zeros(g), 1.0, 9);
  const auto r = check_monotonicity(operators::negated_identity(g), sampler, 10, 1e-12);
  EXPECT_FALSE(r.passed);
  EXPECT_LT(r.min_value, 0.0);
  EXPECT_EQ(r.failures, 10u);

  const HilbertVector u(g, {1.0, 0.0, 0.0}), v(g, {0.0, 2.0, 0.0});
  const NonlinearOperator F = operators::negated_identity(g);
  EXPECT_DOUBLE_EQ(inner(F(u) - F(v), u - v), -(u - v).norm() * (u - v).norm());
}

TEST(Monotonicity, HammersteinPasses) {
  const HammersteinProblem p(50);
  BallSampler sampler(HilbertVector::zeros(p.grid()), 5.0, 2024);
  EXPECT_TRUE(check_monotonicity(p.op(), sampler, 100, 1e-12).passed);
}

TEST(BallSampler, SamplesStayInBall) {
  const GridPtr g = Grid::trapezoid(10, 9.0);
  const HilbertVector c = HilbertVector::constant(g, 1.0);
  BallSampler s(c, 0.5, 3);
  for (int i = 0; i < 200; ++i) EXPECT_LE((s.next() - c).norm(), 0.5 * (1 + 1e-12));
}

TEST(SolveShifted, ZeroMap) {
  const GridPtr g = Grid::euclidean(1);
  const HilbertVector x = solve_shifted(LinearMap::zero(g), 2.0, HilbertVector(g, {4.0}));
  EXPECT_DOUBLE_EQ(x[0], 2.0);
}

TEST(SolveShifted, Identity) {
  const GridPtr g = Grid::euclidean(1);
  const HilbertVector x = solve_shifted(LinearMap::identity(g), 1.0, HilbertVector(g, {4.0}));
  EXPECT_DOUBLE_EQ(x[0], 2.0);
}

TEST(SolveShifted, HammersteinDerivativeResidual) {
  const HammersteinProblem p(50);
  const LinearMap A = p.derivative(HilbertVector::zeros(p.grid()));
  const HilbertVector rhs = p.rhs();
  const HilbertVector x = solve_shifted(A, 0.1, rhs);
  HilbertVector r = A(x);
  r.axpy(0.1, x);
  r -= rhs;
  EXPECT_LE(r.norm() / rhs.norm(), 1e-10);
}

TEST(SolveShifted, MatrixFreeMapAboveDenseLimitUsesIterativePath) {
  const std::size_t n = kDenseLimit + 10;
  const GridPtr g = Grid::euclidean(n);
  // Diagonal, positive: A u = diag(1 + i/n) u.
  auto diag = [n](const HilbertVector& u) {
    HilbertVector out = u;
    for (std::size_t i = 0; i < n; ++i) out[i] *= 1.0 + static_cast<double>(i) / n;
    return out;
  };
  const LinearMap A(g, diag, diag);
  const HilbertVector rhs = HilbertVector::constant(g, 1.0);
  const HilbertVector x = solve_shifted(A, 0.5, rhs, 1e-10);
  for (std::size_t i = 0; i < n; i += 401)
    EXPECT_NEAR(x[i], 1.0 / (1.5 + static_cast<double>(i) / n), 1e-8);
}

TEST(FdDerivative, IdentityIsExact) {
  const GridPtr g = Grid::trapezoid(6);
  const HilbertVector u = random_direction(HilbertVector::zeros(g), 4);
  for (double h : {1e-2, 1e-4, 1e-6})
    EXPECT_LE(fd_derivative_check(operators::identity(g), u, 5, h), 1e-12);
}

TEST(FdDerivative, ConstantOperatorHasZeroDerivative) {
  const GridPtr g = Grid::trapezoid(6);
  const NonlinearOperator F = operators::constant(HilbertVector::constant(g, 3.0));
  const HilbertVector u = random_direction(HilbertVector::zeros(g), 8);
  EXPECT_LE(fd_derivative_check(F, u, 5, 1e-3), 1e-12);
}

TEST(FdDerivative, HammersteinAtOne) {
  const HammersteinProblem p(50);
  EXPECT_LE(fd_derivative_check(p.op(), p.exact(), 10, 1e-6), 1e-6);
}

TEST(FdDerivative, MissingDerivativeThrows) {
  const GridPtr g = Grid::euclidean(2);
  const NonlinearOperator F(g, [](const HilbertVector& u) { return u; });
  EXPECT_FALSE(F.has_derivative());
  EXPECT_THROW((void)F.derivative(HilbertVector::zeros(g)), Error);
  EXPECT_THROW((void)fd_derivative_check(F, HilbertVector::zeros(g), 1, 1e-6), Error);
}

TEST(NonlinearOperator, ShiftedEvaluatesAtOffset) {
  const HammersteinProblem p(11);
  const HilbertVector s = HilbertVector::constant(p.grid(), 0.3);
  const NonlinearOperator G = p.op().shifted(s);
  const HilbertVector w = random_direction(s, 2);
  const HilbertVector a = G(w), b = p.apply(w + s);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(a[i], b[i]);
}

TEST(EstimateNorm, DiagonalMatrix) {
  const GridPtr g = Grid::euclidean(3);
  DenseMatrix m(3, 3);
  m(0, 0) = 1.0;
  m(1, 1) = -4.0;
  m(2, 2) = 2.0;
  EXPECT_NEAR(estimate_norm(LinearMap::from_matrix(g, m)), 4.0, 1e-8);
}

}  // namespace
