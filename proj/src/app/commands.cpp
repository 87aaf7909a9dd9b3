#include "dsm/app/commands.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <sstream>

#include "dsm/app/emit.hpp"
#include "dsm/bench.hpp"
#include "dsm/discrepancy.hpp"
#include "dsm/flows.hpp"
#include "dsm/inequalities.hpp"
#include "dsm/iterations.hpp"
#include "dsm/problems.hpp"
#include "dsm/schedules.hpp"

namespace dsm::app {

namespace {

struct Problem {
  NonlinearOperator op;
  HilbertVector f;
  std::optional<HilbertVector> exact;
  bool rank_one = false;
  RankOneProblem r1;
};

std::unique_ptr<Problem> make_problem(const ProblemConfig& pc) {
  if (pc.kind == "hammerstein") {
    const HammersteinProblem h(pc.N, norm_convention_from_string(pc.norm));
    return std::unique_ptr<Problem>(
        new Problem{h.op(), h.rhs(), h.exact(), false, RankOneProblem{}});
  }
  if (pc.kind == "rank_one") {
    RankOneProblem r;
    return std::unique_ptr<Problem>(new Problem{r.op, r.p, r.p, true, r});
  }
  const SyntheticMonotone s(pc.dim, pc.seed);
  return std::unique_ptr<Problem>(
      new Problem{s.op, s.rhs, s.solution, false, RankOneProblem{}});
}

struct Data {
  double delta_rel;
  std::uint64_t seed;
  double delta;
  HilbertVector f_delta;
};

// One data set per (delta_rel, seed); the rank-one problem is noise-free in
// the sense that f_delta = p + delta q, so seeds do not apply there.
std::vector<Data> make_data(const Problem& pr, const ExperimentConfig& cfg) {
  std::vector<Data> out;
  for (double dr : cfg.delta_rel) {
    if (pr.rank_one) {
      out.push_back({dr, 0, dr, pr.r1.f_delta(dr)});
      continue;
    }
    for (std::uint64_t s : cfg.seeds) {
      NoisyData nd = gen_noise(pr.f, dr, s);
      out.push_back({dr, s, nd.delta, std::move(nd.f_delta)});
    }
  }
  return out;
}

std::optional<double> rel_error(const Problem& pr, const HilbertVector& u) {
  if (!pr.exact) return std::nullopt;
  return (u - *pr.exact).norm() / pr.exact->norm();
}

ValidationParams to_params(const ValidationConfig& v) {
  ValidationParams p;
  p.M1 = v.M1;
  p.c0 = v.c0;
  p.c1 = v.c1;
  p.lambda = v.lambda;
  p.y_norm = v.y_norm;
  p.residual0 = v.residual0;
  p.horizon = v.horizon;
  p.alpha_tilde = v.alpha_tilde;
  p.g0 = v.g0;
  return p;
}

ScheduleKind kind_for(const ExperimentConfig& cfg, ScheduleKind fallback) {
  return cfg.schedule.kind ? schedule_kind_from_string(*cfg.schedule.kind) : fallback;
}

// The configured scale, or the validator's smallest passing power of two.
double resolve_scale(const ExperimentConfig& cfg, ScheduleKind kind) {
  if (cfg.schedule.d) return *cfg.schedule.d;
  const ScaleSearch s = search_scale(kind, cfg.schedule.b, cfg.schedule.c,
                                     to_params(cfg.validation));
  if (!s.found)
    throw Error(ErrorKind::ConfigError,
                "no schedule scale in {1, ..., 2^20} passes validation; set schedule.d");
  return s.d;
}

ScheduleKind method_kind(const std::string& method) {
  if (method == "flow-newton") return ScheduleKind::NewtonFlow;
  if (method == "flow-gradient") return ScheduleKind::GradientFlow;
  if (method == "flow-simple") return ScheduleKind::SimpleFlow;
  if (method == "iter-newton") return ScheduleKind::NewtonIter;
  if (method == "iter-gradient") return ScheduleKind::GradientIter;
  if (method == "iter-simple") return ScheduleKind::SimpleIter;
  throw Error(ErrorKind::ConfigError, "method '" + method + "' has no schedule");
}

std::string ext(const ExperimentConfig& cfg) { return cfg.format == "json" ? ".json" : ".csv"; }

CommandResult solve_result(const std::string& name, const std::vector<SolveRow>& rows,
                           const ExperimentConfig& cfg) {
  const Format f = format_from_string(cfg.format);
  CommandResult res;
  res.documents.push_back({name + ext(cfg), emit_solve(rows, f)});
  if (cfg.history)
    res.documents.push_back({name + "_history" + ext(cfg), emit_solve_history(rows, f)});
  for (const auto& r : rows)
    if (!r.report.stopped()) {
      res.exit_code = kExitSolver;
      res.message = "a run ended without meeting the discrepancy threshold (" +
                    std::string(to_string(r.report.status)) + ")";
    }
  return res;
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidConfig:
    case ErrorKind::ConstraintViolated:
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidStepSize:
    case ErrorKind::GridMismatch:
      return kExitConfig;
    case ErrorKind::IoError:
      return kExitIo;
    default:
      return kExitSolver;
  }
}

CommandResult run_dp(const ExperimentConfig& cfg) {
  const auto pr = make_problem(cfg.problem);
  DPConfig dc;
  dc.C = cfg.C;
  dc.gamma = cfg.gamma;
  dc.theta = cfg.theta;
  dc.dp_tol = cfg.dp_tol;
  std::vector<DPRow> rows;
  for (const Data& d : make_data(*pr, cfg)) {
    DPRow row;
    row.delta_rel = d.delta_rel;
    row.seed = d.seed;
    row.delta = d.delta;
    row.result = solve_dp(pr->op, d.f_delta, d.delta, dc);
    row.rel_error = rel_error(*pr, row.result.V);
    if (pr->rank_one && cfg.gamma == 1.0) row.a_analytic = RankOneProblem::analytic_a(cfg.C, d.delta);
    rows.push_back(std::move(row));
  }
  CommandResult res;
  res.documents.push_back({"dp" + ext(cfg), emit_dp(rows, format_from_string(cfg.format))});
  return res;
}

CommandResult run_flow(const ExperimentConfig& cfg) {
  const ScheduleKind kind = kind_for(cfg, method_kind(cfg.method));
  if (!is_continuous(kind))
    throw Error(ErrorKind::ConfigError, "flow needs a continuous schedule kind");
  const ContinuousSchedule sched =
      make_continuous(kind, cfg.schedule.b, cfg.schedule.c, resolve_scale(cfg, kind));
  const auto pr = make_problem(cfg.problem);
  FlowConfig fc(sched);
  fc.C1 = cfg.C1;
  fc.zeta = cfg.zeta;
  fc.step_init = cfg.step_init;
  fc.step_min = cfg.step_min;
  fc.step_max = cfg.step_max;
  fc.t_max = cfg.t_max;
  fc.record_history = cfg.history;
  std::vector<SolveRow> rows;
  for (const Data& d : make_data(*pr, cfg)) {
    const HilbertVector u0 = HilbertVector::zeros(d.f_delta.grid());
    SolveRow row{d.delta_rel, d.seed, d.delta, {}, std::nullopt};
    switch (kind) {
      case ScheduleKind::NewtonFlow:
        row.report = flow_newton(pr->op, d.f_delta, d.delta, fc, u0);
        break;
      case ScheduleKind::GradientFlow:
        row.report = flow_gradient(pr->op, d.f_delta, d.delta, fc, u0);
        break;
      default:
        row.report = flow_simple(pr->op, d.f_delta, d.delta, fc, u0);
        break;
    }
    row.rel_error = rel_error(*pr, row.report.u_final);
    rows.push_back(std::move(row));
  }
  return solve_result("flow", rows, cfg);
}

CommandResult run_iterate(const ExperimentConfig& cfg) {
  const ScheduleKind kind = kind_for(cfg, method_kind(cfg.method));
  if (is_continuous(kind))
    throw Error(ErrorKind::ConfigError, "iterate needs a discrete schedule kind");
  const auto pr = make_problem(cfg.problem);
  std::vector<SolveRow> rows;
  for (const Data& d : make_data(*pr, cfg)) {
    const DiscreteSchedule sched =
        (kind == ScheduleKind::NewtonIter && !cfg.schedule.d)
            ? heuristic_newton_schedule(cfg.schedule.C0, d.delta, cfg.schedule.exponent)
            : make_discrete(kind, cfg.schedule.b, cfg.schedule.c, resolve_scale(cfg, kind));
    IterConfig ic(sched);
    ic.C1 = cfg.C1;
    ic.exponent = cfg.gamma;
    ic.M1 = cfg.M1;
    ic.alpha = cfg.alpha;
    ic.n_max = cfg.n_max;
    ic.record_history = cfg.history;
    const HilbertVector u0 = HilbertVector::zeros(d.f_delta.grid());
    SolveRow row{d.delta_rel, d.seed, d.delta, {}, std::nullopt};
    switch (kind) {
      case ScheduleKind::NewtonIter:
        row.report = iter_newton(pr->op, d.f_delta, d.delta, ic, u0);
        break;
      case ScheduleKind::GradientIter:
        row.report = iter_gradient(pr->op, d.f_delta, d.delta, ic, u0);
        break;
      default:
        row.report = iter_simple(pr->op, d.f_delta, d.delta, ic, u0);
        break;
    }
    row.rel_error = rel_error(*pr, row.report.u_final);
    rows.push_back(std::move(row));
  }
  return solve_result("iterate", rows, cfg);
}

CommandResult run_bench(const ExperimentConfig& cfg) {
  if (cfg.problem.kind != "hammerstein")
    throw Error(ErrorKind::ConfigError, "bench runs the hammerstein problem only");
  Table1Config tc;
  tc.delta_rel = cfg.delta_rel;
  tc.N = cfg.problem.N;
  tc.C0 = cfg.schedule.C0;
  tc.C = cfg.C;
  tc.gamma = cfg.gamma;
  tc.schedule_exponent = cfg.schedule.exponent;
  tc.seeds = cfg.seeds;
  tc.norm = norm_convention_from_string(cfg.problem.norm);
  if (cfg.n_max) tc.n_max = *cfg.n_max;
  const std::vector<Table1Row> rows = run_table1(tc);
  CommandResult res;
  res.documents.push_back(
      {"table1" + ext(cfg), emit_table1(rows, format_from_string(cfg.format))});
  for (const auto& r : rows)
    if (!r.ok()) {
      res.exit_code = kExitSolver;
      res.message = "no seed stopped by the discrepancy rule at delta_rel " +
                    format_double(r.delta_rel);
    }
  return res;
}

CommandResult run_schedule_check(const ExperimentConfig& cfg) {
  const ScheduleKind kind =
      cfg.schedule.kind ? schedule_kind_from_string(*cfg.schedule.kind)
                        : method_kind(cfg.method);
  const ValidationParams p = to_params(cfg.validation);
  ConditionReport rep;
  if (cfg.schedule.d) {
    rep = is_continuous(kind)
              ? validate_conditions(
                    make_continuous(kind, cfg.schedule.b, cfg.schedule.c, *cfg.schedule.d), p)
              : validate_conditions(
                    make_discrete(kind, cfg.schedule.b, cfg.schedule.c, *cfg.schedule.d), p);
  } else {
    rep = search_scale(kind, cfg.schedule.b, cfg.schedule.c, p).report;
  }
  CommandResult res;
  res.documents.push_back(
      {"schedule_check" + ext(cfg), emit_conditions(rep, format_from_string(cfg.format))});
  if (!rep.passed) {
    res.exit_code = kExitSolver;
    res.message = "schedule conditions fail";
  }
  return res;
}

CommandResult run_ineq(const ExperimentConfig& cfg) {
  const InequalityConfig& q = cfg.inequality;
  BoundReport rep;
  if (q.mode == "continuous") {
    ContinuousInequality inst;
    inst.alpha = q.alpha;
    inst.beta = q.beta;
    inst.gamma = q.gamma;
    inst.mu = q.mu;
    inst.mu_dot = [m = q.mu](double t) { return m.derivative(t); };
    inst.p = q.p;
    inst.g0 = q.g0;
    inst.tau0 = q.tau0;
    inst.T = q.T;
    rep = bound_continuous(inst, q.n_steps);
  } else {
    DiscreteInequality inst;
    auto seq = [](const FunctionSpec& f) {
      return [f](std::int64_t n) { return f(static_cast<double>(n)); };
    };
    inst.alpha = seq(q.alpha);
    inst.beta = seq(q.beta);
    inst.gamma = seq(q.gamma);
    inst.mu = seq(q.mu);
    inst.h = seq(q.h);
    inst.p = q.p;
    inst.g0 = q.g0;
    inst.N = q.N;
    rep = bound_discrete(inst);
  }
  CommandResult res;
  res.documents.push_back(
      {"ineq" + ext(cfg), emit_bound(rep, format_from_string(cfg.format), cfg.history)});
  return res;
}

CommandResult run_command(const std::string& name, const ExperimentConfig& cfg) {
  try {
    if (name == "dp") return run_dp(cfg);
    if (name == "flow") return run_flow(cfg);
    if (name == "iterate") return run_iterate(cfg);
    if (name == "bench") return run_bench(cfg);
    if (name == "schedule-check") return run_schedule_check(cfg);
    if (name == "ineq") return run_ineq(cfg);
    return {kExitConfig, {}, "unknown subcommand '" + name + "'"};
  } catch (const Error& e) {
    return {exit_code_for(e.kind()), {}, e.what()};
  }
}

}  // namespace dsm::app
