#pragma once

// Comparison bounds for the differential inequality
//   g' <= -gamma(t) g + alpha(t) g^p + beta(t),   g(tau0) = g0,  p > 1,
// and its explicit discrete analogue
//   g_{n+1} <= g_n (1 - h_n gamma_n) + alpha_n h_n g_n^p + h_n beta_n.
// If mu > 0 satisfies
//   alpha/mu^p + beta <= (1/mu) (gamma - mu'/mu)   and   mu(tau0) g0 < 1,
// then g(t) < 1/mu(t) (discrete: g_n <= 1/mu_n, with g0 <= 1/mu_0).
// The checkers verify the hypotheses on samples and integrate the extremal
// equality trajectory, which dominates every solution of the inequality.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dsm/core.hpp"

namespace dsm {

using ScalarFn = std::function<double(double)>;
using SequenceFn = std::function<double(std::int64_t)>;

struct ContinuousInequality {
  ScalarFn alpha, beta, gamma, mu;
  ScalarFn mu_dot;  ///< optional; central difference with step 1e-6 when empty
  double p = 2.0;
  double g0 = 0.0;
  double tau0 = 0.0;
  double T = 10.0;
};

struct DiscreteInequality {
  SequenceFn alpha, beta, gamma, mu, h;
  double p = 2.0;
  double g0 = 0.0;
  std::int64_t N = 100;
};

struct BoundReport {
  std::vector<double> t;  ///< times (continuous) or indices (discrete)
  std::vector<double> g;
  std::vector<double> bound;  ///< 1/mu
  double condition_margin = 0.0;  ///< min of rhs - lhs of the mu condition over samples
  double condition_at = 0.0;
  double initial_margin = 0.0;  ///< 1 - mu(tau0) g0
  double min_margin = 0.0;      ///< min of 1/mu - g along the trajectory
  double min_margin_at = 0.0;
  bool holds = false;
};

/// Number of uniform samples (plus endpoints) used for hypothesis checks.
inline constexpr int kConditionSamples = 10000;

/// Fixed-step RK4 with n_steps steps on [tau0, T]. Throws PreconditionFailed
/// when a hypothesis fails at a sample and BoundViolated when the trajectory
/// reaches 1/mu.
BoundReport bound_continuous(const ContinuousInequality& inst, int n_steps);

/// Throws PreconditionFailed (with index) or BoundViolated.
BoundReport bound_discrete(const DiscreteInequality& inst);

/// Margins of the p = 2 sufficient conditions
///   0 <= alpha <= (mu/2) (gamma - mu'/mu),
///   beta <= (1/(2 mu)) (gamma - mu'/mu),  mu(tau0) g0 < 1,
/// and of the general condition they imply, on the sampling grid.
struct QuadraticConditions {
  double alpha_margin = 0.0;
  double beta_margin = 0.0;
  double initial_margin = 0.0;
  double general_margin = 0.0;
  bool passed = false;          ///< the three p = 2 conditions
  bool implies_general = false;  ///< passed => general_margin >= -tol
};

QuadraticConditions check_quadratic_conditions(const ContinuousInequality& inst,
                                               double tol = 1e-12);

/// Evaluated mu'(t) as the checkers see it.
double mu_derivative(const ContinuousInequality& inst, double t);

/// u' = A u + h(t, u) + f(t), A self-adjoint with <Au, u> <= -gamma(t) ||u||^2,
/// <h(t, u), u> <= alpha(t) ||u||^{1+p} and ||f(t)|| <= beta(t); then
/// g = ||u|| satisfies the inequality above and g(t) < 1/mu(t).
using EvolutionTerm = std::function<HilbertVector(double t, const HilbertVector& u)>;
using Forcing = std::function<HilbertVector(double t)>;

struct EvolutionReport {
  BoundReport bound;  ///< g = ||u(t)|| along the integrated solution
  double dissipation_margin = 0.0;  ///< min of -gamma ||u||^2 - <Au, u> over samples
  double growth_margin = 0.0;       ///< min of alpha ||u||^{1+p} - <h, u>
  double forcing_margin = 0.0;      ///< min of beta - ||f||
  HilbertVector u_final;
};

/// The inequality's g0 and T are taken from ||u0|| and T. Throws
/// PreconditionFailed or BoundViolated.
EvolutionReport evolution_norm_bound(const LinearMap& A, const EvolutionTerm& h,
                                     const Forcing& f, const HilbertVector& u0,
                                     ContinuousInequality inst, double T, int n_steps,
                                     std::uint64_t seed = 3);

}  // namespace dsm
