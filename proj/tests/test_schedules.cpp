#include <gtest/gtest.h>

#include <cmath>

#include "dsm/rng.hpp"
#include "dsm/schedules.hpp"

namespace {

using namespace dsm;

ValidationParams benchmark_params() {
  ValidationParams p;
  p.M1 = 1.731;
  p.c0 = 1.0;
  p.c1 = 1.0;
  p.y_norm = 7.0;
  p.residual0 = 8.55;
  p.horizon = 100.0;
  return p;
}

TEST(MakeContinuous, NewtonFlowAboveBoundary) {
  const auto s = make_continuous(ScheduleKind::NewtonFlow, 1.0, 7.0, 10.0);
  EXPECT_DOUBLE_EQ(s.a(0.0), 10.0 / 7.0);
  EXPECT_DOUBLE_EQ(s.a_dot(3.0), -10.0 / 100.0);
}

TEST(MakeContinuous, NewtonFlowBelowBoundaryReportsMargin) {
  try {
    (void)make_continuous(ScheduleKind::NewtonFlow, 1.0, 5.0, 10.0);
    FAIL();
  } catch (const ConstraintViolated& e) {
    EXPECT_EQ(e.condition(), "c > 6b");
    EXPECT_DOUBLE_EQ(e.margin(), -1.0);
    EXPECT_FALSE(e.boundary());
    EXPECT_EQ(e.kind(), ErrorKind::ConstraintViolated);
  }
}

TEST(MakeContinuous, NewtonFlowEqualityIsBoundaryFailure) {
  try {
    (void)make_continuous(ScheduleKind::NewtonFlow, 1.0, 6.0, 10.0);
    FAIL();
  } catch (const ConstraintViolated& e) {
    EXPECT_TRUE(e.boundary());
    EXPECT_EQ(e.margin(), 0.0);
  }
}

TEST(MakeContinuous, GradientFlowScaleCondition) {
  // d^2 c^{1-2b} = 1.69 >= 6b = 1.5
  EXPECT_NO_THROW((void)make_continuous(ScheduleKind::GradientFlow, 0.25, 1.0, 1.3));
  EXPECT_THROW((void)make_continuous(ScheduleKind::GradientFlow, 0.25, 1.0, 1.2), ConstraintViolated);
  EXPECT_THROW((void)make_continuous(ScheduleKind::GradientFlow, 0.3, 1.0, 5.0), ConstraintViolated);
  EXPECT_THROW((void)make_continuous(ScheduleKind::GradientFlow, 0.25, 0.5, 5.0), ConstraintViolated);
}

TEST(MakeContinuous, SimpleFlowScaleCondition) {
  EXPECT_NO_THROW((void)make_continuous(ScheduleKind::SimpleFlow, 0.5, 1.0, 3.0));
  EXPECT_THROW((void)make_continuous(ScheduleKind::SimpleFlow, 0.5, 1.0, 2.9), ConstraintViolated);
  EXPECT_THROW((void)make_continuous(ScheduleKind::SimpleFlow, 0.6, 1.0, 3.0), ConstraintViolated);
}

TEST(MakeContinuous, DiscreteKindRejected) {
  EXPECT_THROW((void)make_continuous(ScheduleKind::NewtonIter, 1.0, 7.0, 1.0), Error);
  EXPECT_THROW((void)make_discrete(ScheduleKind::NewtonFlow, 1.0, 1.0, 1.0), Error);
}

TEST(MakeDiscrete, NewtonRatioBoundary) {
  const auto s = make_discrete(ScheduleKind::NewtonIter, 1.0, 1.0, 5.0);
  EXPECT_DOUBLE_EQ(s.a(0) / s.a(1), 2.0);
}

TEST(MakeDiscrete, RangeChecks) {
  EXPECT_THROW((void)make_discrete(ScheduleKind::SimpleIter, 0.6, 1.0, 1.0), ConstraintViolated);
  EXPECT_THROW((void)make_discrete(ScheduleKind::GradientIter, 0.3, 1.0, 1.0), ConstraintViolated);
  EXPECT_THROW((void)make_discrete(ScheduleKind::NewtonIter, 1.0, 0.5, 1.0), ConstraintViolated);
  EXPECT_THROW((void)make_discrete(ScheduleKind::NewtonIter, 1.0, 1.0, 0.0), ConstraintViolated);
  EXPECT_THROW((void)make_discrete(ScheduleKind::NewtonIter, 0.0, 1.0, 1.0), ConstraintViolated);
}

TEST(HeuristicSchedule, FirstTerm) {
  const auto s = heuristic_newton_schedule(4.0, 0.01);
  EXPECT_NEAR(s.a(0), 4.0 * std::pow(0.01, 0.99), 1e-15);
  EXPECT_NEAR(s.a(0), 0.04188514, 1e-8);
  EXPECT_NEAR(s.a(9), s.a(0) / 10.0, 1e-16);
}

TEST(ScheduleKind, NamesRoundTrip) {
  for (auto k : {ScheduleKind::NewtonFlow, ScheduleKind::GradientFlow, ScheduleKind::SimpleFlow,
                 ScheduleKind::NewtonIter, ScheduleKind::GradientIter, ScheduleKind::SimpleIter})
    EXPECT_EQ(schedule_kind_from_string(to_string(k)), k);
  EXPECT_THROW((void)schedule_kind_from_string("newton"), Error);
}

TEST(ScheduleProperty, TimeToReachInvertsA) {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const double b = rng.uniform(0.05, 1.0);
    const double c = 6.0 * b + rng.uniform(0.01, 5.0);
    const double d = rng.uniform(0.1, 50.0);
    const auto s = make_continuous(ScheduleKind::NewtonFlow, b, c, d);
    const double level = s.a(0.0) * rng.uniform(1e-4, 0.99);
    const double t = s.time_to_reach(level);
    EXPECT_NEAR(s.a(t), level, 1e-10 * level);
    EXPECT_EQ(s.time_to_reach(2.0 * s.a(0.0)), 0.0);
  }
}

TEST(ScheduleProperty, DiscreteRatioAtMostTwo) {
  Rng rng(21);
  const ScheduleKind kinds[] = {ScheduleKind::NewtonIter, ScheduleKind::GradientIter,
                                ScheduleKind::SimpleIter};
  const double caps[] = {1.0, 0.25, 0.5};
  for (int i = 0; i < 300; ++i) {
    const int k = i % 3;
    const auto s = make_discrete(kinds[k], rng.uniform(1e-3, caps[k]), rng.uniform(1.0, 20.0),
                                 rng.uniform(0.1, 10.0));
    for (std::int64_t n = 0; n < 50; ++n) {
      EXPECT_LE(s.a(n), 2.0 * s.a(n + 1));
      EXPECT_GT(s.a(n), s.a(n + 1));
    }
  }
}

TEST(ScheduleProperty, NewtonFlowRateBracketAtLeastFiveSixths) {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const double b = rng.uniform(0.05, 1.0);
    const double c = 6.0 * b * (1.0 + rng.uniform(1e-6, 1.0));
    const auto s = make_continuous(ScheduleKind::NewtonFlow, b, c, 10.0);
    ValidationParams p = benchmark_params();
    p.lambda = 1.0;
    const ConditionReport r = validate_conditions(s, p);
    const ConditionResult* br = r.find("rate_bracket");
    ASSERT_NE(br, nullptr);
    EXPECT_GT(br->worst_margin, 5.0 / 6.0);
    EXPECT_NEAR(br->worst_margin, 1.0 - b / c, 1e-15);
    EXPECT_EQ(br->at, 0.0);
  }
}

TEST(ValidateConditions, LambdaAtLowerBoundIsBoundaryPass) {
  ValidationParams p = benchmark_params();
  p.lambda = p.M1 / p.y_norm;
  const ConditionReport r =
      validate_conditions(make_continuous(ScheduleKind::NewtonFlow, 1.0, 7.0, 10.0), p);
  const ConditionResult* lo = r.find("lambda_lower");
  ASSERT_NE(lo, nullptr);
  EXPECT_EQ(lo->worst_margin, 0.0);
  EXPECT_TRUE(lo->passed);
  EXPECT_FALSE(r.lambda_auto);
}

TEST(ValidateConditions, SimpleFlowRateBound) {
  // |a'| <= a^2/2 iff b (c + t)^{b-1} <= d/2. The relative form is tightest at
  // t = 0 (1/2 <= 3/2); the absolute margin 4.5/(1+t) - 1.5/(1+t)^1.5 shrinks
  // with t, so the reported worst sample is the horizon end.
  ValidationParams p = benchmark_params();
  p.lambda = 1.0;
  const ConditionReport r =
      validate_conditions(make_continuous(ScheduleKind::SimpleFlow, 0.5, 1.0, 3.0), p);
  const ConditionResult* rate = r.find("rate_bound");
  ASSERT_NE(rate, nullptr);
  EXPECT_TRUE(rate->passed);
  EXPECT_NEAR(rate->at, p.horizon, 1e-9);
  const double t = rate->at;
  EXPECT_NEAR(rate->worst_margin, 4.5 / (1.0 + t) - 1.5 / std::pow(1.0 + t, 1.5), 1e-12);
  for (double s : {0.0, 1.0, 10.0, 100.0}) EXPECT_LE(0.5 * std::pow(1.0 + s, -0.5), 1.5);
}

TEST(ValidateConditions, AutoLambdaRespectsFloor) {
  const ValidationParams p = benchmark_params();
  const ConditionReport r =
      validate_conditions(make_continuous(ScheduleKind::NewtonFlow, 1.0, 7.0, 64.0), p);
  EXPECT_TRUE(r.lambda_auto);
  EXPECT_GE(r.lambda, p.M1 / p.y_norm);
  EXPECT_TRUE(r.passed);
  for (const auto& c : r.conditions) EXPECT_TRUE(c.passed) << c.name;
}

TEST(ValidateConditions, EveryKindReportsNamedConditions) {
  const ValidationParams p = benchmark_params();
  const auto cont = [&](ScheduleKind k, double b, double c, double d) {
    return validate_conditions(make_continuous(k, b, c, d), p);
  };
  const auto disc = [&](ScheduleKind k, double b, double c, double d) {
    return validate_conditions(make_discrete(k, b, c, d), p);
  };
  EXPECT_NE(cont(ScheduleKind::NewtonFlow, 1, 7, 10).find("drift_c1"), nullptr);
  EXPECT_NE(cont(ScheduleKind::GradientFlow, 0.25, 1, 1.3).find("initial_gap"), nullptr);
  EXPECT_NE(cont(ScheduleKind::SimpleFlow, 0.5, 1, 3).find("rate_bound"), nullptr);
  EXPECT_NE(disc(ScheduleKind::NewtonIter, 1, 1, 1).find("step_c1"), nullptr);
  EXPECT_NE(disc(ScheduleKind::GradientIter, 0.25, 1, 1).find("drift_c0"), nullptr);
  EXPECT_NE(disc(ScheduleKind::SimpleIter, 0.5, 1, 1).find("ratio"), nullptr);
}

TEST(ValidateConditions, RejectsBadHorizon) {
  ValidationParams p = benchmark_params();
  p.horizon = 0.0;
  EXPECT_THROW((void)validate_conditions(make_continuous(ScheduleKind::NewtonFlow, 1, 7, 10), p),
               Error);
}

TEST(ValidationTimes, StartAtZeroAndEndAtHorizon) {
  const auto ts = validation_times(50.0);
  ASSERT_EQ(ts.size(), 1001u);
  EXPECT_EQ(ts.front(), 0.0);
  EXPECT_NEAR(ts.back(), 50.0, 1e-12);
  for (std::size_t i = 1; i < ts.size(); ++i) EXPECT_GT(ts[i], ts[i - 1]);
}

TEST(SearchScale, NewtonFlowFindsPassingScale) {
  const ScaleSearch s = search_scale(ScheduleKind::NewtonFlow, 1.0, 7.0, benchmark_params());
  ASSERT_TRUE(s.found);
  EXPECT_TRUE(s.report.passed);
  EXPECT_EQ(std::log2(s.d), std::floor(std::log2(s.d)));
  // No smaller power of two passes.
  if (s.d > 1.0) {
    const auto smaller = validate_conditions(
        make_continuous(ScheduleKind::NewtonFlow, 1.0, 7.0, s.d / 2), benchmark_params());
    EXPECT_FALSE(smaller.passed);
  }
}

TEST(SearchScale, SkipsScalesRejectedByConstruction) {
  // d = 1, 2 violate d c^{1-b} >= 6b = 3 for the simple flow with c = 1.
  const ScaleSearch s = search_scale(ScheduleKind::SimpleFlow, 0.5, 1.0, benchmark_params());
  if (s.found) {
    EXPECT_GE(s.d, 4.0);
  }
}

}  // namespace
