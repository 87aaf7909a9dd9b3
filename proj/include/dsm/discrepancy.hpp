#pragma once

// Discrepancy principle for the regularization parameter: pick a(delta) with
//   ||F(V_{delta,a}) - f_delta|| = C delta^gamma,
// its shifted variant around a reference element u_bar, and the a-posteriori
// acceptance test for approximate regularized solutions.

#include <optional>

#include "dsm/regularized.hpp"

namespace dsm {

struct DPConfig {
  double C = 1.01;      ///< > 1
  double gamma = 0.9;   ///< in (0, 1]
  double theta = 1.0;   ///< inexactness factor of the acceptance test, > 0
  std::optional<double> C1;  ///< lower window constant, defaults to C/2
  std::optional<double> C2;  ///< upper window constant, defaults to 2C
  double dp_tol = 1e-6;      ///< relative tolerance on the achieved residual
  double a_init = 1.0;       ///< starting point for bracketing
  int max_bisections = 200;

  [[nodiscard]] double lower() const { return C1.value_or(0.5 * C); }
  [[nodiscard]] double upper() const { return C2.value_or(2.0 * C); }

  /// Throws InvalidConfig on out-of-range constants.
  void validate() const;
};

enum class DPStatus {
  Solved,
  /// ||F(0) - f_delta|| <= C delta^gamma: the zero element already passes the
  /// discrepancy test, so no a(delta) exists; V = 0 and a_delta = +inf.
  AlreadyCompatible,
};

struct DPResult {
  DPStatus status = DPStatus::Solved;
  double a_delta = 0.0;
  HilbertVector V;
  double achieved_residual = 0.0;
  double target = 0.0;
  int bracket_evals = 0;  ///< phi evaluations, bracketing plus bisection
  int bisection_steps = 0;
};

/// Throws InvalidConfig if C delta^gamma <= delta.
DPResult solve_dp(const NonlinearOperator& F, const HilbertVector& f_delta, double delta,
                  const DPConfig& cfg);

/// Solves F(V) + a (V - u_bar) = f_delta with the discrepancy choice of a,
/// via the shifted operator w -> F(w + u_bar).
DPResult solve_dp_shifted(const NonlinearOperator& F, const HilbertVector& f_delta,
                          double delta, const DPConfig& cfg, const HilbertVector& u_bar);

struct AcceptanceReport {
  double defect = 0.0;        ///< ||F(v) + alpha v - f_delta||
  double defect_bound = 0.0;  ///< theta * delta
  double residual = 0.0;      ///< ||F(v) - f_delta||
  double window_lo = 0.0;     ///< C1 delta^gamma
  double window_hi = 0.0;     ///< C2 delta^gamma
  bool defect_ok = false;
  bool window_ok = false;
  bool accepted = false;
  /// false when 0 < gamma < 1 or 0 < C1 < C2 fails; the convergence
  /// guarantee then does not apply even if both conditions hold.
  bool hypotheses_ok = false;
};

AcceptanceReport accept_candidate(const NonlinearOperator& F, const HilbertVector& f_delta,
                                  double delta, const HilbertVector& v, double alpha,
                                  const DPConfig& cfg);

}  // namespace dsm
