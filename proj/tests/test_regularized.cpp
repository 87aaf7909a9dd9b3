#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "dsm/bench.hpp"
#include "dsm/problems.hpp"
#include "dsm/regularized.hpp"
#include "oracles.hpp"

namespace {

using namespace dsm;

TEST(SolveRegularized, ZeroOperator) {
  const GridPtr g = Grid::trapezoid(5);
  const auto s = solve_regularized(operators::zero(g), HilbertVector::constant(g, 3.0), 0.5);
  for (double v : s.V.values()) EXPECT_NEAR(v, 6.0, 1e-12);
}

TEST(SolveRegularized, Identity) {
  const GridPtr g = Grid::trapezoid(5);
  const auto s = solve_regularized(operators::identity(g), HilbertVector::constant(g, 2.0), 1.0);
  for (double v : s.V.values()) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(SolveRegularized, HammersteinSmallAApproachesSolution) {
  const HammersteinProblem p(50);
  const HilbertVector f = p.rhs();
  const auto s = solve_regularized(p.op(), f, 1e-4);
  EXPECT_LE((s.V - p.exact()).norm() / p.exact().norm(), 1e-3);
}

TEST(SolveRegularized, HammersteinMatchesIndependentNewton) {
  const HammersteinProblem p(30);
  const HilbertVector f = p.rhs();
  const std::vector<double> fv(f.values().begin(), f.values().end());
  for (double a : {1e-3, 0.1, 10.0}) {
    RegularizedOptions o;
    o.tol = 1e-13;
    const auto s = solve_regularized(p.op(), f, a, o);
    const auto ref = oracle::hammerstein_regularized(p, fv, a);
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(s.V[i], ref[i], 1e-9) << a;
  }
}

TEST(SolveRegularized, RelaxationPathWithoutDerivative) {
  const HammersteinProblem p(20);
  const NonlinearOperator F(p.grid(), [&p](const HilbertVector& u) { return p.apply(u); },
                            {}, p.op().bounds());
  RegularizedOptions o;
  o.tol = 1e-11;
  const auto s = solve_regularized(F, p.rhs(), 0.5, o);
  const auto ref = solve_regularized(p.op(), p.rhs(), 0.5, o);
  EXPECT_LE((s.V - ref.V).norm(), 1e-9);
  EXPECT_LE(s.residual, 1e-11);
}

TEST(PhiPsi, IdentityClosedForm) {
  const GridPtr g = Grid::euclidean(1);
  const HilbertVector f(g, {2.0});
  const auto r = phi_psi(operators::identity(g), f, 1.0);
  EXPECT_NEAR(r.psi, 1.0, 1e-12);
  EXPECT_NEAR(r.phi, 1.0, 1e-12);
  const auto big = phi_psi(operators::identity(g), f, 100.0);
  EXPECT_NEAR(big.phi, 200.0 / 101.0, 1e-12);
  EXPECT_LT(big.phi, 2.0);
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, i / double(n - 1)));
  return out;
}

void expect_phi_up_psi_down(const NonlinearOperator& F, const HilbertVector& f) {
  double prev_phi = -1.0, prev_psi = INFINITY;
  for (double a : geometric_grid(1e-4, 1e2, 20)) {
    RegularizedOptions o;
    o.tol = 1e-13;
    const PhiPsi r = phi_psi(F, f, a, o);
    EXPECT_GT(r.phi, prev_phi) << a;
    EXPECT_LE(r.psi, prev_psi) << a;
    EXPECT_NEAR(r.phi, r.residual, 1e-10 * (1 + r.phi));
    prev_phi = r.phi;
    prev_psi = r.psi;
  }
}

TEST(PhiPsi, HammersteinMonotoneInA) {
  const HammersteinProblem p(50);
  expect_phi_up_psi_down(p.op(), gen_noise(p.rhs(), 0.01, 3).f_delta);
}

TEST(PhiPsi, SyntheticMonotoneInA) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SyntheticMonotone s(8, seed);
    expect_phi_up_psi_down(s.op, s.rhs);
  }
}

TEST(Bracket, IdentityExpandsTwice) {
  const GridPtr g = Grid::euclidean(1);
  const HilbertVector f(g, {2.0});
  const Bracket b = bracket_for_target(operators::identity(g), f, 1.0, 0.25);
  EXPECT_DOUBLE_EQ(b.a_lo, 0.5);
  EXPECT_DOUBLE_EQ(b.a_hi, 1.0);
  EXPECT_LT(b.phi_lo, 1.0);
  EXPECT_GE(b.phi_hi, 1.0);
}

TEST(Bracket, TargetAboveLimitHasNoRoot) {
  const GridPtr g = Grid::euclidean(1);
  const HilbertVector f(g, {2.0});
  try {
    (void)bracket_for_target(operators::identity(g), f, 2.5, 1.0);
    FAIL() << "expected NoRoot";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoRoot);
  }
}

TEST(Bracket, HammersteinNoisyDataBracketsTarget) {
  const HammersteinProblem p(50);
  const NoisyData d = gen_noise(p.rhs(), 0.02, 11);
  const double target = 1.01 * std::pow(d.delta, 0.9);
  const Bracket b = bracket_for_target(p.op(), d.f_delta, target, 1.0);
  EXPECT_LT(b.a_lo, b.a_hi);
  EXPECT_LT(phi_psi(p.op(), d.f_delta, b.a_lo).phi, target);
  EXPECT_GE(phi_psi(p.op(), d.f_delta, b.a_hi).phi, target);
}

}  // namespace
