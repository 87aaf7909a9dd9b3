#pragma once

// The regularized equation F(V) + a V = f_delta for fixed a > 0 and the
// residual/norm functions phi(a) = ||F(V_a) - f_delta|| = a ||V_a|| and
// psi(a) = ||V_a||. For monotone F, psi is non-increasing and phi strictly
// increasing, with phi(a) -> ||F(0) - f_delta|| as a -> infinity.

#include <optional>

#include "dsm/core.hpp"

namespace dsm {

struct RegularizedOptions {
  /// Residual tolerance on ||F(V) + aV - f||; default_regularized_tol if unset.
  std::optional<double> tol;
  std::optional<HilbertVector> warm_start;
  int max_newton_steps = 200;
  int max_relaxation_steps = 10000;
};

struct RegularizedSolution {
  HilbertVector V;
  double a = 0.0;
  double residual = 0.0;  ///< ||F(V) + aV - f||
  int inner_iterations = 0;
};

/// max(1e-12, 1e-4 * a * ||f||)
double default_regularized_tol(double a, const HilbertVector& f);

/// Damped Newton with backtracking when F' is available; fixed-point
/// relaxation V <- V - s (F(V) + aV - f), s = 1/(2a + M1), otherwise.
/// Throws NonConvergence when the budget is exhausted above tolerance.
RegularizedSolution solve_regularized(const NonlinearOperator& F, const HilbertVector& f,
                                      double a, const RegularizedOptions& opts = {});

struct PhiPsi {
  double phi = 0.0;       ///< a * psi
  double psi = 0.0;       ///< ||V||
  double residual = 0.0;  ///< ||F(V) - f||, equal to phi up to the solve tolerance
  RegularizedSolution solution;
};

PhiPsi phi_psi(const NonlinearOperator& F, const HilbertVector& f, double a,
               const RegularizedOptions& opts = {});

struct Bracket {
  double a_lo = 0.0;
  double a_hi = 0.0;
  double phi_lo = 0.0;
  double phi_hi = 0.0;
  int evaluations = 0;
  HilbertVector V_lo;
  HilbertVector V_hi;
};

inline constexpr int kMaxBracketDoublings = 200;

/// Finds a_lo < a_hi with phi(a_lo) < target <= phi(a_hi) by doubling or
/// halving from a_init. Throws NoRoot if target >= ||F(0) - f|| and
/// BudgetExceeded after kMaxBracketDoublings steps.
Bracket bracket_for_target(const NonlinearOperator& F, const HilbertVector& f,
                           double target, double a_init,
                           const RegularizedOptions& opts = {});

}  // namespace dsm
