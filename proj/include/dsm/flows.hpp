#pragma once

// Continuous regularized flows
//   Newton:    u' = -(F'(u) + a(t) I)^{-1} G(u, t)
//   gradient:  u' = -(F'(u) + a(t) I)^*  G(u, t)
//   simple:    u' = -G(u, t)
// with G(u, t) = F(u) + a(t) u - f_delta, integrated by adaptive explicit
// Euler until the first time ||F(u) - f_delta|| <= C1 delta^zeta.

#include <optional>

#include "dsm/report.hpp"
#include "dsm/schedules.hpp"

namespace dsm {

struct FlowConfig {
  explicit FlowConfig(ContinuousSchedule s) : schedule(s) {}

  ContinuousSchedule schedule;
  double C1 = 1.5;
  double zeta = 0.9;
  double step_init = 0.1;
  double step_min = 1e-10;
  double step_max = 1.0;
  /// Defaults to the t0 with delta / a(t0) = y_norm / (C - 1), C = (C1 + 1)/2,
  /// when y_norm is set, else 1e6.
  std::optional<double> t_max;
  std::optional<double> y_norm;
  double inner_tol = 1e-10;  ///< relative tolerance of the Newton-flow linear solve
  bool record_history = true;

  void validate() const;
  [[nodiscard]] double horizon(double delta) const;
};

/// Starting point for the flows with defect h(0) = ||F(u0) + a0 u0 - f_delta||
/// no larger than a0 ||V_delta(0)|| / 4.
struct InitialPoint {
  HilbertVector u0;
  HilbertVector V0;  ///< regularized solution at a0
  double defect = 0.0;
  double bound = 0.0;  ///< a0 ||V0|| / 4
};

InitialPoint init_u0(const NonlinearOperator& F, const HilbertVector& f_delta, double a0);

/// For u0 = 0: g0 = ||V_delta(0)|| against ||F(0) - f_delta|| / a0.
struct ZeroStartCheck {
  double g0 = 0.0;
  double bound = 0.0;
  bool holds = false;
};

ZeroStartCheck check_zero_start(const NonlinearOperator& F, const HilbertVector& f_delta,
                                double a0);

SolveReport flow_newton(const NonlinearOperator& F, const HilbertVector& f_delta, double delta,
                        const FlowConfig& cfg, const HilbertVector& u0);
SolveReport flow_gradient(const NonlinearOperator& F, const HilbertVector& f_delta,
                          double delta, const FlowConfig& cfg, const HilbertVector& u0);
/// Needs no derivative.
SolveReport flow_simple(const NonlinearOperator& F, const HilbertVector& f_delta, double delta,
                        const FlowConfig& cfg, const HilbertVector& u0);

/// One explicit Euler step of size h of the Newton flow from u at time t.
HilbertVector newton_flow_euler_step(const NonlinearOperator& F, const HilbertVector& f_delta,
                                     double a, const HilbertVector& u, double h,
                                     double inner_tol = 1e-10);

}  // namespace dsm
