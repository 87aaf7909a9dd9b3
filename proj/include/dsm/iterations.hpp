#pragma once

// Discrete regularized schemes, A_n = F'(u_n) + a_n I,
// G_n = F(u_n) + a_n u_n - f_delta:
//   Newton:    u_{n+1} = u_n - A_n^{-1} G_n
//   gradient:  u_{n+1} = u_n - alpha_n A_n^* G_n,
//              alpha_n in [alpha~, 2 / (a_n^2 + (M1 + a_n)^2)]
//   simple:    u_{n+1} = u_n - alpha_n G_n,
//              alpha_n in [alpha~, 2 / (a_n + (M1 + a_n))]
// stopped at the first n with ||F(u_n) - f_delta|| <= C1 delta^e.

#include <cstdint>
#include <optional>

#include "dsm/report.hpp"
#include "dsm/schedules.hpp"

namespace dsm {

struct IterConfig {
  explicit IterConfig(DiscreteSchedule s) : schedule(s) {}

  DiscreteSchedule schedule;
  double C1 = 1.5;
  double exponent = 0.9;  ///< e in the stopping threshold C1 delta^e
  /// Bound on ||F'|| for the step-size band; estimated at u0 when unset.
  std::optional<double> M1;
  /// Fixed step; must lie in the band at every n. Default: upper endpoint.
  std::optional<double> alpha;
  /// Step floor; default half of the smallest upper endpoint.
  std::optional<double> alpha_tilde;
  /// Default 10 (n0 + 1) with a_{n0} >= delta (C - 1)/y_norm > a_{n0+1},
  /// C = (C1 + 1)/2, when y_norm is set, else 100000.
  std::optional<std::int64_t> n_max;
  std::optional<double> y_norm;
  double inner_tol = 1e-10;
  bool record_history = true;

  void validate() const;
  [[nodiscard]] std::int64_t horizon(double delta) const;
};

SolveReport iter_newton(const NonlinearOperator& F, const HilbertVector& f_delta, double delta,
                        const IterConfig& cfg, const HilbertVector& u0);
/// Throws InvalidStepSize when the step band is empty.
SolveReport iter_gradient(const NonlinearOperator& F, const HilbertVector& f_delta,
                          double delta, const IterConfig& cfg, const HilbertVector& u0);
/// Needs no derivative.
SolveReport iter_simple(const NonlinearOperator& F, const HilbertVector& f_delta, double delta,
                        const IterConfig& cfg, const HilbertVector& u0);

/// Upper endpoints of the step bands.
[[nodiscard]] double gradient_step_limit(double a, double M1) noexcept;
[[nodiscard]] double simple_step_limit(double a, double M1) noexcept;

/// 1.1 times a power-iteration estimate of ||F'(u)||; without a derivative,
/// the spectral radius of the central-difference Jacobian is used.
double estimate_M1(const NonlinearOperator& F, const HilbertVector& u);

}  // namespace dsm
