#include "dsm/problems.hpp"

#include <cmath>
#include <memory>

#include "dsm/rng.hpp"

namespace dsm {

RankOneProblem::RankOneProblem()
    : grid(Grid::euclidean(2)),
      op(operators::linear(
          [&] {
            DenseMatrix m(2, 2);
            m(0, 0) = 1.0;
            return LinearMap::from_matrix(grid, std::move(m));
          }(),
          1.0)),
      p(grid, {1.0, 0.0}),
      q(grid, {0.0, 1.0}) {}

HilbertVector RankOneProblem::f_delta(double delta) const {
  HilbertVector f = p;
  f.axpy(delta, q);
  return f;
}

double RankOneProblem::analytic_a(double C, double delta) {
  if (!(C > 1.0)) throw Error(ErrorKind::InvalidArgument, "C must exceed 1");
  const double c = std::sqrt(C * C - 1.0);
  if (!(c * delta < 1.0)) throw Error(ErrorKind::InvalidArgument, "needs c delta < 1");
  return c * delta / (1.0 - c * delta);
}

HilbertVector RankOneProblem::analytic_limit(const RankOneProblem& pr, double C) {
  HilbertVector v = pr.p;
  v.axpy(1.0 / std::sqrt(C * C - 1.0), pr.q);
  return v;
}

SyntheticMonotone::SyntheticMonotone(std::size_t dim, std::uint64_t seed)
    : grid(Grid::euclidean(dim)), M(dim, dim), op(operators::zero(grid)) {
  if (dim == 0) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  Rng rng(seed);
  DenseMatrix B(dim, dim), S(dim, dim);
  for (double& x : B.data) x = rng.normal();
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j) {
      S(i, j) = 0.5 * rng.normal();
      S(j, i) = -S(i, j);
    }
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) s += B(k, i) * B(k, j);
      M(i, j) = s / static_cast<double>(dim) + S(i, j);
    }

  auto m = std::make_shared<const DenseMatrix>(M);
  auto g = grid;
  auto lin = std::make_shared<const LinearMap>(LinearMap::from_matrix(g, M));
  auto apply = [lin](const HilbertVector& u) {
    HilbertVector out = lin->apply(u);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += std::tanh(u[i]);
    return out;
  };
  auto derivative = [m, g](const HilbertVector& u) {
    DenseMatrix j = *m;
    for (std::size_t i = 0; i < j.rows; ++i) {
      const double c = std::cosh(u[i]);
      j(i, i) += 1.0 / (c * c);
    }
    return LinearMap::from_matrix(g, std::move(j));
  };
  OperatorBounds b;
  b.M1 = estimate_norm(LinearMap::from_matrix(grid, M)) * 1.1 + 1.0;
  op = NonlinearOperator(grid, apply, derivative, b);

  solution = HilbertVector::zeros(grid);
  for (double& x : solution.values()) x = rng.uniform(-1.0, 1.0);
  rhs = op(solution);
}

}  // namespace dsm
