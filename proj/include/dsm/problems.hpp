#pragma once

// Small synthetic monotone problems with known structure.

#include <cstdint>

#include "dsm/core.hpp"

namespace dsm {

/// F(u) = <u, p> p on R^2 with p = e1, q = e2, f = p and f_delta = p + delta q.
/// The minimal-norm solution is p. With the discrepancy equation
/// ||F(V) - f_delta|| = C delta, a(delta) = c delta / (1 - c delta),
/// c = sqrt(C^2 - 1), and V_{delta, a(delta)} -> p + q / c as delta -> 0.
struct RankOneProblem {
  RankOneProblem();

  GridPtr grid;
  NonlinearOperator op;
  HilbertVector p, q;

  [[nodiscard]] HilbertVector f_delta(double delta) const;
  /// Throws InvalidArgument unless C > 1 and c delta < 1.
  [[nodiscard]] static double analytic_a(double C, double delta);
  [[nodiscard]] static HilbertVector analytic_limit(const RankOneProblem& pr, double C);
};

/// F(u) = M u + tanh(u) on R^dim with M = B^T B / dim + S, B Gaussian and
/// S skew-symmetric; monotone since <Mu, u> = ||Bu||^2 / dim >= 0.
struct SyntheticMonotone {
  SyntheticMonotone(std::size_t dim, std::uint64_t seed);

  GridPtr grid;
  DenseMatrix M;
  NonlinearOperator op;
  /// A solution u* and f = F(u*).
  HilbertVector solution;
  HilbertVector rhs;
};

}  // namespace dsm
