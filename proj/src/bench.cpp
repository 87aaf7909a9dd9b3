#include "dsm/bench.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <memory>
#include <sstream>
#include <thread>

#include "dsm/iterations.hpp"
#include "dsm/kernels.hpp"
#include "dsm/rng.hpp"
#include "dsm/schedules.hpp"

namespace dsm {

namespace {

constexpr int kMaxNoiseRedraws = 16;

std::vector<double> uniform_nodes(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

std::vector<double> trapezoid_weights(std::size_t n) {
  const double h = 1.0 / static_cast<double>(n - 1);
  std::vector<double> w(n, h);
  w.front() = w.back() = 0.5 * h;
  return w;
}

GridPtr make_grid(std::size_t n, NormConvention norm) {
  switch (norm) {
    case NormConvention::Nodal: return Grid::trapezoid(n, static_cast<double>(n - 1));
    case NormConvention::L2: return Grid::trapezoid(n);
    case NormConvention::Euclidean: return Grid::euclidean(n);
  }
  return Grid::euclidean(n);
}

DenseMatrix make_kernel(const std::vector<double>& x, const std::vector<double>& w) {
  const std::size_t n = x.size();
  DenseMatrix k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k(i, j) = std::exp(-std::abs(x[i] - x[j])) * w[j];
  return k;
}

double cube_atan(double u) {
  const double t = std::atan(u);
  return t * t * t;
}

double cube_atan_derivative(double u) {
  const double t = std::atan(u);
  return 3.0 * t * t / (1.0 + u * u);
}

HilbertVector apply_hammerstein(const GridPtr& grid, const DenseMatrix& k,
                                const HilbertVector& u) {
  if (!u.grid() || !u.grid()->same_as(*grid))
    throw Error(ErrorKind::GridMismatch, "vector is not on the benchmark grid");
  HilbertVector out = HilbertVector::zeros(grid);
  kernels::gemv(k.data, k.rows, k.cols, u.values(), out.values());
  auto o = out.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += cube_atan(u[i]);
  return out;
}

LinearMap derivative_hammerstein(const GridPtr& grid, const DenseMatrix& k,
                                 const HilbertVector& u) {
  if (!u.grid() || !u.grid()->same_as(*grid))
    throw Error(ErrorKind::GridMismatch, "vector is not on the benchmark grid");
  DenseMatrix j = k;
  for (std::size_t i = 0; i < j.rows; ++i) j(i, i) += cube_atan_derivative(u[i]);
  return LinearMap::from_matrix(grid, std::move(j));
}

NonlinearOperator make_operator(const GridPtr& grid, const DenseMatrix& kernel) {
  auto k = std::make_shared<const DenseMatrix>(kernel);
  OperatorBounds b;
  // ||K|| + sup D: the kernel block is bounded by its row sums, D by its
  // maximum 3 (pi/2)^2 / (1 + u^2) attained near |u| ~ 1.4.
  double row_max = 0.0;
  for (std::size_t i = 0; i < kernel.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < kernel.cols; ++j) s += std::abs(kernel(i, j));
    row_max = std::max(row_max, s);
  }
  double d_max = 0.0;
  for (double u = 0.0; u <= 10.0; u += 1e-3) d_max = std::max(d_max, cube_atan_derivative(u));
  b.M1 = row_max + d_max;
  return NonlinearOperator(
      grid, [grid, k](const HilbertVector& u) { return apply_hammerstein(grid, *k, u); },
      [grid, k](const HilbertVector& u) { return derivative_hammerstein(grid, *k, u); }, b);
}

}  // namespace

std::string_view to_string(NormConvention n) noexcept {
  switch (n) {
    case NormConvention::Nodal: return "nodal";
    case NormConvention::L2: return "l2";
    case NormConvention::Euclidean: return "euclidean";
  }
  return "unknown";
}

NormConvention norm_convention_from_string(std::string_view name) {
  if (name == "nodal") return NormConvention::Nodal;
  if (name == "l2") return NormConvention::L2;
  if (name == "euclidean") return NormConvention::Euclidean;
  throw Error(ErrorKind::InvalidArgument, "unknown norm convention '" + std::string(name) + "'");
}

HammersteinProblem::HammersteinProblem(std::size_t n_nodes, NormConvention norm)
    : n_(n_nodes),
      norm_(norm),
      grid_(n_nodes >= 2 ? make_grid(n_nodes, norm)
                         : throw Error(ErrorKind::InvalidArgument, "need at least 2 nodes")),
      nodes_(uniform_nodes(n_nodes)),
      quad_(trapezoid_weights(n_nodes)),
      kernel_(make_kernel(nodes_, quad_)),
      op_(make_operator(grid_, kernel_)) {}

HilbertVector HammersteinProblem::apply(const HilbertVector& u) const {
  return apply_hammerstein(grid_, kernel_, u);
}

LinearMap HammersteinProblem::derivative(const HilbertVector& u) const {
  return derivative_hammerstein(grid_, kernel_, u);
}

HilbertVector HammersteinProblem::exact() const { return HilbertVector::constant(grid_, 1.0); }

HilbertVector HammersteinProblem::rhs() const { return apply(exact()); }

NoisyData gen_noise(const HilbertVector& f, double delta_rel, std::uint64_t seed) {
  if (!(delta_rel > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta_rel must be positive");
  NoisyData out;
  for (int k = 0; k < kMaxNoiseRedraws; ++k) {
    Rng rng(seed + static_cast<std::uint64_t>(k));
    HilbertVector noise = HilbertVector::zeros(f.grid());
    for (double& x : noise.values()) x = rng.normal();
    const double nn = noise.norm();
    if (!(nn > 0.0)) {
      ++out.redraws;
      continue;
    }
    out.delta = delta_rel * f.norm();
    out.kappa = out.delta / nn;
    out.f_delta = f;
    out.f_delta.axpy(out.kappa, noise);
    out.seed_used = seed + static_cast<std::uint64_t>(k);
    return out;
  }
  throw Error(ErrorKind::DegenerateNoise, "noise draws have zero norm");
}

void Table1Config::validate() const {
  if (delta_rel.empty()) throw Error(ErrorKind::InvalidConfig, "delta_rel list is empty");
  for (double d : delta_rel)
    if (!(d > 0.0)) throw Error(ErrorKind::InvalidConfig, "delta_rel must be positive");
  if (N < 2) throw Error(ErrorKind::InvalidConfig, "N must be at least 2");
  if (!(C0 > 0.0)) throw Error(ErrorKind::InvalidConfig, "C0 must be positive");
  if (!(C > 1.0)) throw Error(ErrorKind::InvalidConfig, "C must exceed 1");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw Error(ErrorKind::InvalidConfig, "gamma must lie in (0, 1]");
  if (!(schedule_exponent > 0.0))
    throw Error(ErrorKind::InvalidConfig, "schedule_exponent must be positive");
  if (seeds.empty()) throw Error(ErrorKind::InvalidConfig, "seed list is empty");
  if (n_max < 1) throw Error(ErrorKind::InvalidConfig, "n_max must be positive");
}

SeedRun run_table1_seed(const HammersteinProblem& prob, const Table1Config& cfg,
                        double delta_rel, std::uint64_t seed) {
  SeedRun run;
  run.seed = seed;
  try {
    const HilbertVector exact = prob.exact();
    const NoisyData data = gen_noise(prob.rhs(), delta_rel, seed);
    run.delta = data.delta;
    IterConfig ic(heuristic_newton_schedule(cfg.C0, data.delta, cfg.schedule_exponent));
    ic.C1 = cfg.C;
    ic.exponent = cfg.gamma;
    ic.n_max = cfg.n_max;
    ic.record_history = false;
    const SolveReport rep = iter_newton(prob.op(), data.f_delta, data.delta, ic,
                                        HilbertVector::zeros(prob.grid()));
    run.status = rep.status;
    run.n_iterations = rep.n_stop;
    run.rel_error = (rep.u_final - exact).norm() / exact.norm();
    run.residual_at_stop = rep.residual_at_stop;
    run.a_at_stop = rep.a_at_stop;
  } catch (const Error& e) {
    run.error = e.what();
  }
  return run;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<Table1Row> run_table1(const Table1Config& cfg) {
  cfg.validate();
  const HammersteinProblem prob(cfg.N, cfg.norm);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t width = cfg.threads ? cfg.threads : hw;

  std::vector<std::pair<std::size_t, std::uint64_t>> jobs;
  for (std::size_t r = 0; r < cfg.delta_rel.size(); ++r)
    for (std::uint64_t s : cfg.seeds) jobs.emplace_back(r, s);

  std::vector<SeedRun> runs(jobs.size());
  for (std::size_t start = 0; start < jobs.size(); start += width) {
    std::vector<std::future<SeedRun>> batch;
    const std::size_t stop = std::min(jobs.size(), start + width);
    for (std::size_t j = start; j < stop; ++j)
      batch.push_back(std::async(std::launch::async, [&, j] {
        return run_table1_seed(prob, cfg, cfg.delta_rel[jobs[j].first], jobs[j].second);
      }));
    for (std::size_t j = start; j < stop; ++j) runs[j] = batch[j - start].get();
  }

  std::vector<Table1Row> rows(cfg.delta_rel.size());
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r].delta_rel = cfg.delta_rel[r];
  for (std::size_t j = 0; j < jobs.size(); ++j) rows[jobs[j].first].runs.push_back(runs[j]);
  for (Table1Row& row : rows) {
    std::vector<double> n, e, res, a;
    for (const SeedRun& s : row.runs) {
      if (s.status != StopStatus::StoppedByDiscrepancy || !s.error.empty()) continue;
      n.push_back(static_cast<double>(s.n_iterations));
      e.push_back(s.rel_error);
      res.push_back(s.residual_at_stop);
      a.push_back(s.a_at_stop);
    }
    row.seed_count = n.size();
    row.n_iterations = median(n);
    row.rel_error = median(e);
    row.residual_at_stop = median(res);
    row.a_at_stop = median(a);
  }
  return rows;
}

}  // namespace dsm
