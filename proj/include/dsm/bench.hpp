#pragma once

// Hammerstein benchmark
//   F(u)(x) = int_0^1 exp(-|x - y|) u(y) dy + arctan(u(x))^3   on [0, 1],
// discretized on N uniform nodes with the trapezoid rule, with seeded
// Gaussian noise and the Newton-iteration table driver.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dsm/core.hpp"
#include "dsm/report.hpp"

namespace dsm {

/// Inner product used for norms, noise scaling and errors.
///   Nodal:     sum_i c_i u_i v_i, c = trapezoid weights / h (1 inside, 1/2 at the ends)
///   L2:        sum_i w_i u_i v_i, w = trapezoid weights
///   Euclidean: sum_i u_i v_i
/// Nodal and L2 differ by the constant factor h, so both keep the discrete
/// kernel self-adjoint and the operator monotone; the Euclidean product does not.
enum class NormConvention { Nodal, L2, Euclidean };

[[nodiscard]] std::string_view to_string(NormConvention n) noexcept;
NormConvention norm_convention_from_string(std::string_view name);

class HammersteinProblem {
 public:
  explicit HammersteinProblem(std::size_t n_nodes, NormConvention norm = NormConvention::Nodal);

  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
  [[nodiscard]] NormConvention norm() const noexcept { return norm_; }
  [[nodiscard]] const std::vector<double>& nodes() const noexcept { return nodes_; }
  /// Trapezoid quadrature weights (h/2 at the ends, h inside), independent of the norm.
  [[nodiscard]] const std::vector<double>& quadrature() const noexcept { return quad_; }
  /// K_ij = exp(-|x_i - x_j|) w_j.
  [[nodiscard]] const DenseMatrix& kernel() const noexcept { return kernel_; }

  [[nodiscard]] HilbertVector apply(const HilbertVector& u) const;
  /// w -> D(u) w + K w, D(u)_i = 3 arctan(u_i)^2 / (1 + u_i^2).
  [[nodiscard]] LinearMap derivative(const HilbertVector& u) const;
  [[nodiscard]] const NonlinearOperator& op() const noexcept { return op_; }

  /// u = 1, the exact solution of the benchmark, and f = F(1).
  [[nodiscard]] HilbertVector exact() const;
  [[nodiscard]] HilbertVector rhs() const;

 private:
  std::size_t n_;
  NormConvention norm_;
  GridPtr grid_;
  std::vector<double> nodes_, quad_;
  DenseMatrix kernel_;
  NonlinearOperator op_;
};

struct NoisyData {
  HilbertVector f_delta;
  double delta = 0.0;  ///< delta_rel ||f||
  double kappa = 0.0;  ///< delta / ||noise||
  std::uint64_t seed_used = 0;
  int redraws = 0;  ///< degenerate (zero-norm) draws skipped
};

/// f_delta = f + kappa noise, noise ~ N(0, 1) per node from Rng(seed),
/// kappa = delta_rel ||f|| / ||noise||. A zero-norm draw is redrawn with
/// seed + 1; after 16 such draws DegenerateNoise is thrown.
NoisyData gen_noise(const HilbertVector& f, double delta_rel, std::uint64_t seed);

struct Table1Config {
  std::vector<double> delta_rel{0.05, 0.03, 0.02, 0.01, 0.003, 0.001};
  std::size_t N = 50;
  double C0 = 4.0;
  double C = 1.01;      ///< stopping constant
  double gamma = 0.99;  ///< stopping exponent
  double schedule_exponent = 0.99;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  NormConvention norm = NormConvention::Nodal;
  std::int64_t n_max = 1000;
  unsigned threads = 0;  ///< 0: hardware concurrency

  void validate() const;
};

struct SeedRun {
  std::uint64_t seed = 0;
  double delta = 0.0;
  std::int64_t n_iterations = 0;
  double rel_error = 0.0;
  double residual_at_stop = 0.0;
  double a_at_stop = 0.0;
  StopStatus status = StopStatus::ExhaustedHorizon;
  std::string error;  ///< set when the solver threw
};

struct Table1Row {
  double delta_rel = 0.0;
  double n_iterations = 0.0;  ///< median over successful seeds
  double rel_error = 0.0;
  double residual_at_stop = 0.0;
  double a_at_stop = 0.0;
  std::size_t seed_count = 0;  ///< seeds that stopped by the discrepancy rule
  std::vector<SeedRun> runs;
  [[nodiscard]] bool ok() const noexcept { return seed_count > 0; }
};

/// One Newton-iteration run: a_n = C0 delta^schedule_exponent / (n + 1),
/// u0 = 0, stop at ||F(u_n) - f_delta|| <= C delta^gamma.
SeedRun run_table1_seed(const HammersteinProblem& prob, const Table1Config& cfg,
                        double delta_rel, std::uint64_t seed);

/// Runs every (delta_rel, seed) pair concurrently; rows are in input order.
std::vector<Table1Row> run_table1(const Table1Config& cfg);

[[nodiscard]] double median(std::vector<double> v);

}  // namespace dsm
