#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "dsm/bench.hpp"
#include "dsm/flows.hpp"
#include "dsm/iterations.hpp"
#include "dsm/regularized.hpp"

namespace {

using namespace dsm;

// Classic RK4 for a scalar ODE y' = f(t, y); returns the first time the
// monitored quantity m(y) drops to `level` (linear interpolation between
// steps) and y there.
struct Crossing {
  double t = -1.0;
  double y = 0.0;
};

Crossing rk4_crossing(const std::function<double(double, double)>& f,
                      const std::function<double(double)>& m, double y0, double level,
                      double h, double t_end) {
  double t = 0.0, y = y0;
  while (t < t_end) {
    const double k1 = f(t, y);
    const double k2 = f(t + h / 2, y + h / 2 * k1);
    const double k3 = f(t + h / 2, y + h / 2 * k2);
    const double k4 = f(t + h, y + h * k3);
    const double yn = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (m(yn) <= level) {
      const double s = (m(y) - level) / (m(y) - m(yn));
      return {t + s * h, y + s * (yn - y)};
    }
    t += h;
    y = yn;
  }
  return {};
}

GridPtr line() { return Grid::euclidean(1); }

TEST(FlowNewton, CompatibleStartReturnsImmediately) {
  const GridPtr g = line();
  const HilbertVector f(g, {1.0});
  FlowConfig c(make_continuous(ScheduleKind::NewtonFlow, 1.0, 7.0, 10.0));
  const HilbertVector u0(g, {0.99});
  const SolveReport r = flow_newton(operators::identity(g), f, 0.01, c, u0);
  EXPECT_EQ(r.status, StopStatus::StoppedByDiscrepancy);
  EXPECT_EQ(r.t_stop, 0.0);
  EXPECT_EQ(r.n_stop, 0);
  EXPECT_EQ(r.u_final[0], 0.99);
}

TEST(FlowGradient, CompatibleStartReturnsImmediately) {
  const GridPtr g = line();
  FlowConfig c(make_continuous(ScheduleKind::GradientFlow, 0.25, 1.0, 1.3));
  const SolveReport r =
      flow_gradient(operators::identity(g), HilbertVector(g, {1.0}), 0.01, c, HilbertVector(g, {1.0}));
  EXPECT_EQ(r.t_stop, 0.0);
  EXPECT_EQ(r.status, StopStatus::StoppedByDiscrepancy);
}

TEST(FlowSimple, CompatibleStartReturnsImmediately) {
  const GridPtr g = line();
  FlowConfig c(make_continuous(ScheduleKind::SimpleFlow, 0.5, 1.0, 3.0));
  const SolveReport r =
      flow_simple(operators::identity(g), HilbertVector(g, {1.0}), 0.01, c, HilbertVector(g, {1.0}));
  EXPECT_EQ(r.t_stop, 0.0);
}

TEST(FlowNewton, ScalarStopTimeMatchesReference) {
  const GridPtr g = line();
  const auto s = make_continuous(ScheduleKind::NewtonFlow, 1.0, 7.0, 10.0);
  FlowConfig c(s);
  c.step_init = c.step_max = 0.01;
  const double delta = 0.01, thr = 1.5 * std::pow(delta, 0.9);
  const SolveReport r =
      flow_newton(operators::identity(g), HilbertVector(g, {1.0}), delta, c, HilbertVector(g, {0.0}));
  ASSERT_EQ(r.status, StopStatus::StoppedByDiscrepancy);
  EXPECT_LE(r.residual_at_stop, thr);

  // u' = -((1 + a) u - 1) / (1 + a)
  const Crossing ref = rk4_crossing(
      [&](double t, double u) { return -((1 + s.a(t)) * u - 1) / (1 + s.a(t)); },
      [](double u) { return std::abs(u - 1); }, 0.0, thr, 1e-4, 1e4);
  ASSERT_GT(ref.t, 0.0);
  EXPECT_NEAR(r.t_stop, ref.t, 0.01 * ref.t);
  EXPECT_NEAR(r.u_final[0], ref.y, 1e-3);
}

TEST(FlowGradient, ScalarStopTimeMatchesReference) {
  const GridPtr g = line();
  const auto s = make_continuous(ScheduleKind::GradientFlow, 0.25, 1.0, 1.3);
  FlowConfig c(s);
  c.step_init = c.step_max = 0.01;
  const double delta = 0.1, thr = 1.5 * std::pow(delta, 0.9);
  const SolveReport r = flow_gradient(operators::identity(g), HilbertVector(g, {1.0}), delta, c,
                                      HilbertVector(g, {0.0}));
  ASSERT_EQ(r.status, StopStatus::StoppedByDiscrepancy);
  // u' = -(1 + a) ((1 + a) u - 1)
  const Crossing ref = rk4_crossing(
      [&](double t, double u) { return -(1 + s.a(t)) * ((1 + s.a(t)) * u - 1); },
      [](double u) { return std::abs(u - 1); }, 0.0, thr, 1e-4, 1e5);
  ASSERT_GT(ref.t, 0.0);
  EXPECT_NEAR(r.t_stop, ref.t, 0.01 * ref.t);
  EXPECT_NEAR(r.u_final[0], ref.y, 1e-3);
}

TEST(FlowSimple, ScalarTrajectoryMatchesReference) {
  const GridPtr g = line();
  const auto s = make_continuous(ScheduleKind::SimpleFlow, 0.5, 1.0, 3.0);
  FlowConfig c(s);
  c.step_init = c.step_max = c.step_min = 1e-4;
  c.t_max = 2.0;
  const SolveReport r = flow_simple(operators::identity(g), HilbertVector(g, {1.0}), 1e-3, c,
                                    HilbertVector(g, {0.0}));
  ASSERT_EQ(r.status, StopStatus::ExhaustedHorizon);
  // Reference: RK4 with step 1e-5 of u' = -((1 + a) u - 1); Euler with h = 1e-4
  // is first order, so agreement is O(h).
  auto rhs = [&](double t, double u) { return -((1 + s.a(t)) * u - 1); };
  double t = 0.0, u = 0.0;
  const double h = 1e-5;
  std::size_t k = 0;
  int checked = 0;
  for (const ResidualSample& smp : r.history) {
    while (t + h / 2 < smp.t) {
      const double k1 = rhs(t, u), k2 = rhs(t + h / 2, u + h / 2 * k1),
                   k3 = rhs(t + h / 2, u + h / 2 * k2), k4 = rhs(t + h, u + h * k3);
      u += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      t += h;
    }
    if (k++ % 1000 == 0) {
      EXPECT_NEAR(smp.residual, std::abs(u - 1.0), 1e-4) << smp.t;
      ++checked;
    }
  }
  EXPECT_GE(checked, 10);
}

TEST(FlowNewton, EulerStepWithUnitStepIsNewtonIterate) {
  const HammersteinProblem p(50);
  const NoisyData d = gen_noise(p.rhs(), 0.01, 3);
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const HilbertVector u = 2.0 * random_direction(p.exact(), s);
    const double a = 0.05 * static_cast<double>(s);
    const HilbertVector e = newton_flow_euler_step(p.op(), d.f_delta, a, u, 1.0, 1e-13);
    IterConfig ic(make_discrete(ScheduleKind::NewtonIter, 1.0, 1.0, a));
    ic.n_max = 1;
    ic.C1 = 1.0001;
    ic.inner_tol = 1e-13;
    const SolveReport it = iter_newton(p.op(), d.f_delta, 1e-12, ic, u);
    ASSERT_EQ(it.n_stop, 1);
    EXPECT_LE((e - it.u_final).norm(), 1e-12);
  }
}

class HammersteinFlows : public ::testing::Test {
 protected:
  HammersteinProblem p{50};
  NoisyData d = gen_noise(p.rhs(), 0.01, 1);
  HilbertVector zero = HilbertVector::zeros(p.grid());

  double rel_error(const SolveReport& r) const {
    return (r.u_final - p.exact()).norm() / p.exact().norm();
  }

  // Residual strictly above threshold before the stop.
  static void expect_stopping_contract(const SolveReport& r) {
    ASSERT_EQ(r.status, StopStatus::StoppedByDiscrepancy);
    EXPECT_LE(r.residual_at_stop, r.threshold);
    ASSERT_FALSE(r.history.empty());
    for (std::size_t i = 0; i + 1 < r.history.size(); ++i) {
      EXPECT_GT(r.history[i].residual, r.threshold);
      EXPECT_GT(r.history[i].residual, 0.0);
    }
    EXPECT_EQ(r.history.back().t, r.t_stop);
  }
};

TEST_F(HammersteinFlows, NewtonStops) {
  FlowConfig c(make_continuous(ScheduleKind::NewtonFlow, 1.0, 7.0, 10.0));
  const SolveReport r = flow_newton(p.op(), d.f_delta, d.delta, c, zero);
  expect_stopping_contract(r);
  EXPECT_LE(rel_error(r), 0.1);
}

TEST_F(HammersteinFlows, GradientStops) {
  FlowConfig c(make_continuous(ScheduleKind::GradientFlow, 0.25, 1.0, 1.3));
  c.C1 = 5.0;
  c.record_history = true;
  const SolveReport r = flow_gradient(p.op(), d.f_delta, d.delta, c, zero);
  expect_stopping_contract(r);
  EXPECT_LE(rel_error(r), 0.1);
}

TEST_F(HammersteinFlows, SimpleStops) {
  FlowConfig c(make_continuous(ScheduleKind::SimpleFlow, 0.5, 1.0, 3.0));
  const SolveReport r = flow_simple(p.op(), d.f_delta, d.delta, c, zero);
  expect_stopping_contract(r);
  EXPECT_LE(rel_error(r), 0.1);
}

TEST_F(HammersteinFlows, SimpleFlowWithoutDerivative) {
  const NonlinearOperator F(p.grid(), [this](const HilbertVector& u) { return p.apply(u); });
  FlowConfig c(make_continuous(ScheduleKind::SimpleFlow, 0.5, 1.0, 3.0));
  const SolveReport r = flow_simple(F, d.f_delta, d.delta, c, zero);
  EXPECT_EQ(r.status, StopStatus::StoppedByDiscrepancy);
}

TEST_F(HammersteinFlows, NewtonErrorDecreasesWithNoise) {
  double prev = INFINITY;
  for (double dr : {3e-2, 1e-2, 3e-3, 1e-3}) {
    const NoisyData nd = gen_noise(p.rhs(), dr, 1);
    FlowConfig c(make_continuous(ScheduleKind::NewtonFlow, 1.0, 7.0, 10.0));
    c.record_history = false;
    const SolveReport r = flow_newton(p.op(), nd.f_delta, nd.delta, c, zero);
    ASSERT_EQ(r.status, StopStatus::StoppedByDiscrepancy);
    EXPECT_LT(rel_error(r), prev) << dr;
    prev = rel_error(r);
  }
}

TEST_F(HammersteinFlows, NewtonTracksRegularizedPath) {
  ValidationParams vp;
  vp.M1 = p.op().bounds().M1;
  vp.c0 = vp.c1 = 1.0;
  vp.y_norm = p.exact().norm();
  vp.residual0 = (p.apply(zero) - d.f_delta).norm();
  const ScaleSearch sc = search_scale(ScheduleKind::NewtonFlow, 1.0, 7.0, vp);
  ASSERT_TRUE(sc.found);
  const auto sched = make_continuous(ScheduleKind::NewtonFlow, 1.0, 7.0, sc.d);
  const InitialPoint ip = init_u0(p.op(), d.f_delta, sched.a(0.0));
  FlowConfig c(sched);
  const SolveReport r = flow_newton(p.op(), d.f_delta, d.delta, c, ip.u0);
  ASSERT_EQ(r.status, StopStatus::StoppedByDiscrepancy);
  RegularizedOptions o;
  o.tol = 1e-13;
  const HilbertVector V = solve_regularized(p.op(), d.f_delta, r.a_at_stop, o).V;
  EXPECT_LE((r.u_final - V).norm(), r.a_at_stop / sc.report.lambda * 1.5);
}

TEST_F(HammersteinFlows, WrongScheduleKindRejected) {
  FlowConfig c(make_continuous(ScheduleKind::SimpleFlow, 0.5, 1.0, 3.0));
  try {
    (void)flow_newton(p.op(), d.f_delta, d.delta, c, zero);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
  }
}

TEST_F(HammersteinFlows, ShortHorizonReportsExhaustion) {
  FlowConfig c(make_continuous(ScheduleKind::NewtonFlow, 1.0, 7.0, 10.0));
  c.t_max = 5.0;
  const SolveReport r = flow_newton(p.op(), d.f_delta, d.delta, c, zero);
  EXPECT_EQ(r.status, StopStatus::ExhaustedHorizon);
  EXPECT_NEAR(r.t_stop, 5.0, 1e-12);
  EXPECT_GT(r.residual_at_stop, r.threshold);
}

TEST(FlowConfig, ValidationAndHorizon) {
  FlowConfig c(make_continuous(ScheduleKind::NewtonFlow, 1.0, 7.0, 10.0));
  EXPECT_EQ(c.horizon(0.1), 1e6);
  c.y_norm = 7.0;
  // delta / a(t0) = y / (C - 1), C = 1.25: a(t0) = 0.1 * 0.25 / 7
  EXPECT_NEAR(c.horizon(0.1), 10.0 / (0.025 / 7.0) - 7.0, 1e-8);
  c.t_max = 3.0;
  EXPECT_EQ(c.horizon(0.1), 3.0);
  c.C1 = 1.0;
  EXPECT_THROW(c.validate(), Error);
  c.C1 = 1.5;
  c.step_min = 1.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(InitU0, ExactRegularizedSolutionHasTinyDefect) {
  const HammersteinProblem p(50);
  const NoisyData d = gen_noise(p.rhs(), 0.01, 2);
  const double a0 = heuristic_newton_schedule(4.0, d.delta).a(0);
  const InitialPoint ip = init_u0(p.op(), d.f_delta, a0);
  HilbertVector g = p.apply(ip.u0);
  g.axpy(a0, ip.u0);
  g -= d.f_delta;
  EXPECT_NEAR(g.norm(), ip.defect, 1e-14);
  EXPECT_LE(g.norm(), 0.25 * a0 * ip.V0.norm());
}

TEST(ZeroStart, IdentityBound) {
  const GridPtr g = Grid::euclidean(1);
  const ZeroStartCheck z = check_zero_start(operators::identity(g), HilbertVector(g, {2.0}), 1.0);
  EXPECT_NEAR(z.g0, 1.0, 1e-12);
  EXPECT_NEAR(z.bound, 2.0, 1e-15);
  EXPECT_TRUE(z.holds);
}

}  // namespace
