#pragma once

// Power-law regularization schedules and validators for the conditions each
// flow / iteration needs.
//
//   continuous:  a(t)  = d  / (c + t)^b,   a'(t) = -b d / (c + t)^{b+1}
//   discrete:    a_n   = d0 / (d + n)^b
//
// The kind tag records which solver a schedule is meant for and fixes the
// admissible parameter ranges.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dsm/error.hpp"

namespace dsm {

enum class ScheduleKind {
  NewtonFlow,
  GradientFlow,
  SimpleFlow,
  NewtonIter,
  GradientIter,
  SimpleIter,
};

[[nodiscard]] std::string_view to_string(ScheduleKind kind) noexcept;
/// Accepts the names printed by to_string ("newton_flow", ...).
ScheduleKind schedule_kind_from_string(std::string_view name);
[[nodiscard]] bool is_continuous(ScheduleKind kind) noexcept;

class ContinuousSchedule {
 public:
  [[nodiscard]] double a(double t) const;
  [[nodiscard]] double a_dot(double t) const;

  [[nodiscard]] ScheduleKind kind() const noexcept { return kind_; }
  [[nodiscard]] double b() const noexcept { return b_; }
  [[nodiscard]] double c() const noexcept { return c_; }
  [[nodiscard]] double d() const noexcept { return d_; }

  /// Smallest t >= 0 with a(t) <= level (0 if a(0) <= level already).
  [[nodiscard]] double time_to_reach(double level) const;

 private:
  friend ContinuousSchedule make_continuous(ScheduleKind, double, double, double);
  ContinuousSchedule(ScheduleKind kind, double b, double c, double d)
      : kind_(kind), b_(b), c_(c), d_(d) {}
  ScheduleKind kind_;
  double b_, c_, d_;
};

class DiscreteSchedule {
 public:
  [[nodiscard]] double a(std::int64_t n) const;

  [[nodiscard]] ScheduleKind kind() const noexcept { return kind_; }
  [[nodiscard]] double b() const noexcept { return b_; }
  [[nodiscard]] double offset() const noexcept { return offset_; }
  [[nodiscard]] double d0() const noexcept { return d0_; }

 private:
  friend DiscreteSchedule make_discrete(ScheduleKind, double, double, double);
  DiscreteSchedule(ScheduleKind kind, double b, double offset, double d0)
      : kind_(kind), b_(b), offset_(offset), d0_(d0) {}
  ScheduleKind kind_;
  double b_, offset_, d0_;
};

/// Thrown by the factories; names the inequality and how far it missed.
class ConstraintViolated : public Error {
 public:
  ConstraintViolated(std::string condition, double margin, bool boundary = false);
  [[nodiscard]] const std::string& condition() const noexcept { return condition_; }
  [[nodiscard]] double margin() const noexcept { return margin_; }
  /// True when the miss is an exact equality at a strict inequality.
  [[nodiscard]] bool boundary() const noexcept { return boundary_; }

 private:
  std::string condition_;
  double margin_;
  bool boundary_;
};

/// newton_flow: 0 < b <= 1, c > 6b.
/// gradient_flow: 0 < b <= 1/4, c >= 1, d^2 c^{1-2b} >= 6b.
/// simple_flow: 0 < b <= 1/2, c >= 1, d c^{1-b} >= 6b.
ContinuousSchedule make_continuous(ScheduleKind kind, double b, double c, double d);

/// newton_iter: 0 < b <= 1; gradient_iter: 0 < b <= 1/4; simple_iter:
/// 0 < b <= 1/2. All kinds need offset >= 1 and d0 > 0, which gives
/// a_n / a_{n+1} <= 2^b <= 2.
DiscreteSchedule make_discrete(ScheduleKind kind, double b, double offset, double d0);

/// a_n = C0 delta^exponent / (n + 1), the practical Newton-iteration choice.
DiscreteSchedule heuristic_newton_schedule(double C0, double delta, double exponent = 0.99);

struct ValidationParams {
  double M1 = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double lambda = 0.0;  ///< <= 0 selects lambda automatically
  double y_norm = 1.0;
  double residual0 = 0.0;  ///< ||F(0) - f_delta||
  double horizon = 100.0;  ///< t_max for flows, n_max for iterations
  double alpha_tilde = 0.0;  ///< <= 0 selects the solvers' default step floor
  double g0 = 0.0;  ///< ||u0 - V_delta(0)||
};

struct ConditionResult {
  std::string name;
  std::string inequality;
  double worst_margin = 0.0;  ///< rhs - lhs at the worst sample
  double at = 0.0;            ///< t or n of the worst sample
  bool strict = false;
  bool passed = false;
};

struct ConditionReport {
  ScheduleKind kind = ScheduleKind::NewtonFlow;
  double b = 0.0, c = 0.0, d = 0.0;
  double lambda = 0.0;
  bool lambda_auto = false;
  std::vector<ConditionResult> conditions;
  bool passed = false;

  [[nodiscard]] const ConditionResult* find(std::string_view name) const;
};

/// Evaluates every condition of the schedule's kind on t = 0 plus 1000
/// log-spaced points up to the horizon (all n = 0..horizon for discrete
/// schedules). With params.lambda <= 0 the smallest power of two >= M1/y_norm
/// that satisfies all conditions is used (or M1/y_norm if none does).
ConditionReport validate_conditions(const ContinuousSchedule& s, const ValidationParams& p);
ConditionReport validate_conditions(const DiscreteSchedule& s, const ValidationParams& p);

struct ScaleSearch {
  bool found = false;
  double d = 0.0;  ///< d for flows, d0 for iterations
  ConditionReport report;
};

/// Smallest d in {1, 2, 4, ..., 2^20} for which validate_conditions passes.
ScaleSearch search_scale(ScheduleKind kind, double b, double c, const ValidationParams& p);

/// Sample times used by the continuous validator.
std::vector<double> validation_times(double horizon);

}  // namespace dsm
