#include "dsm/flows.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "dsm/regularized.hpp"

namespace dsm {

namespace {

constexpr double kAcceptSlack = 1e-12;
constexpr int kGrowAfter = 5;
constexpr double kStopTimeRelTol = 1e-3;

// Direction field u' = rhs(u, F(u), a).
using Rhs = std::function<HilbertVector(const HilbertVector& u, const HilbertVector& Fu,
                                        const HilbertVector& G, double a)>;

HilbertVector defect_from(const HilbertVector& Fu, const HilbertVector& u,
                          const HilbertVector& f, double a) {
  HilbertVector g = Fu;
  g.axpy(a, u);
  g -= f;
  return g;
}

void require_kind(const FlowConfig& cfg, ScheduleKind expected) {
  if (cfg.schedule.kind() != expected) {
    std::ostringstream os;
    os << "schedule kind " << to_string(cfg.schedule.kind()) << " used with a "
       << to_string(expected) << " solver";
    throw Error(ErrorKind::InvalidConfig, os.str());
  }
}

SolveReport integrate(const char* method, const NonlinearOperator& F,
                      const HilbertVector& f, double delta, const FlowConfig& cfg,
                      const HilbertVector& u0, const Rhs& rhs) {
  cfg.validate();
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  require_same_grid(u0, f);
  const ContinuousSchedule& sched = cfg.schedule;
  const double thr = cfg.C1 * std::pow(delta, cfg.zeta);
  const double t_max = cfg.horizon(delta);

  SolveReport rep;
  rep.method = method;
  rep.threshold = thr;

  HilbertVector u = u0;
  HilbertVector Fu = F(u);
  double t = 0.0;
  double r = (Fu - f).norm();
  if (cfg.record_history) rep.history.push_back({t, r});

  auto finish = [&](StopStatus st) {
    rep.status = st;
    rep.t_stop = t;
    rep.residual_at_stop = r;
    rep.a_at_stop = sched.a(t);
    rep.u_final = u;
    return rep;
  };
  if (r <= thr) return finish(StopStatus::StoppedByDiscrepancy);

  double h = std::min(cfg.step_init, cfg.step_max);
  int run = 0;
  while (t < t_max) {
    h = std::min(h, t_max - t);
    const double a = sched.a(t);
    const HilbertVector G = defect_from(Fu, u, f, a);
    const HilbertVector dir = rhs(u, Fu, G, a);

    // Find an accepted step: the defect at the step-end parameter must not grow.
    HilbertVector trial, Ftrial;
    for (;;) {
      trial = u;
      trial.axpy(h, dir);
      Ftrial = F(trial);
      const double a_end = sched.a(t + h);
      const double g_old = defect_from(Fu, u, f, a_end).norm();
      const double g_new = defect_from(Ftrial, trial, f, a_end).norm();
      if (std::isfinite(g_new) && g_new <= g_old * (1.0 + kAcceptSlack)) break;
      ++rep.rejected_steps;
      run = 0;
      h *= 0.5;
      if (h < cfg.step_min) return finish(StopStatus::StepFloor);
    }

    const double r_new = (Ftrial - f).norm();
    if (r_new <= thr) {
      // Locate the crossing on the Euler segment u + s dir, s in (0, h].
      double lo = 0.0, hi = h;
      HilbertVector u_hi = std::move(trial);
      double r_hi = r_new;
      while (hi - lo > kStopTimeRelTol * (t + hi)) {
        const double mid = 0.5 * (lo + hi);
        HilbertVector um = u;
        um.axpy(mid, dir);
        const double rm = (F(um) - f).norm();
        if (rm <= thr) {
          hi = mid;
          u_hi = std::move(um);
          r_hi = rm;
        } else {
          lo = mid;
        }
      }
      t += hi;
      u = std::move(u_hi);
      r = r_hi;
      ++rep.n_stop;
      if (cfg.record_history) rep.history.push_back({t, r});
      return finish(StopStatus::StoppedByDiscrepancy);
    }

    u = std::move(trial);
    Fu = std::move(Ftrial);
    t += h;
    r = r_new;
    ++rep.n_stop;
    if (cfg.record_history) rep.history.push_back({t, r});
    if (++run >= kGrowAfter) {
      h = std::min(2.0 * h, cfg.step_max);
      run = 0;
    }
  }
  return finish(StopStatus::ExhaustedHorizon);
}

}  // namespace

std::string_view to_string(StopStatus s) noexcept {
  switch (s) {
    case StopStatus::StoppedByDiscrepancy: return "stopped_by_discrepancy";
    case StopStatus::ExhaustedHorizon: return "exhausted_horizon";
    case StopStatus::StepFloor: return "step_floor";
  }
  return "unknown";
}

void FlowConfig::validate() const {
  if (!(C1 > 1.0)) throw Error(ErrorKind::InvalidConfig, "C1 must exceed 1");
  if (!(zeta > 0.0 && zeta <= 1.0))
    throw Error(ErrorKind::InvalidConfig, "zeta must lie in (0, 1]");
  if (!(step_min > 0.0 && step_init > 0.0 && step_max > 0.0))
    throw Error(ErrorKind::InvalidConfig, "step sizes must be positive");
  if (!(step_min <= step_init && step_min <= step_max))
    throw Error(ErrorKind::InvalidConfig, "step_min exceeds step_init or step_max");
  if (t_max && !(*t_max > 0.0)) throw Error(ErrorKind::InvalidConfig, "t_max must be positive");
  if (y_norm && !(*y_norm > 0.0))
    throw Error(ErrorKind::InvalidConfig, "y_norm must be positive");
  if (!(inner_tol > 0.0)) throw Error(ErrorKind::InvalidConfig, "inner_tol must be positive");
}

double FlowConfig::horizon(double delta) const {
  if (t_max) return *t_max;
  if (y_norm) {
    const double C = 0.5 * (C1 + 1.0);
    const double t0 = schedule.time_to_reach(delta * (C - 1.0) / *y_norm);
    if (t0 > 0.0 && std::isfinite(t0)) return t0;
  }
  return 1e6;
}

InitialPoint init_u0(const NonlinearOperator& F, const HilbertVector& f_delta, double a0) {
  if (!(a0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "a0 must be positive");
  RegularizedSolution sol = solve_regularized(F, f_delta, a0);
  double bound = 0.25 * a0 * sol.V.norm();
  if (sol.residual > bound) {
    RegularizedOptions o;
    o.tol = std::max(0.1 * bound, 1e-14 * (1.0 + f_delta.norm()));
    o.warm_start = sol.V;
    sol = solve_regularized(F, f_delta, a0, o);
    bound = 0.25 * a0 * sol.V.norm();
  }
  InitialPoint out;
  out.u0 = sol.V;
  out.V0 = sol.V;
  HilbertVector g = F(out.u0);
  g.axpy(a0, out.u0);
  g -= f_delta;
  out.defect = g.norm();
  out.bound = bound;
  return out;
}

ZeroStartCheck check_zero_start(const NonlinearOperator& F, const HilbertVector& f_delta,
                                double a0) {
  if (!(a0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "a0 must be positive");
  RegularizedOptions o;
  o.tol = std::max(1e-14, 1e-10 * a0 * f_delta.norm());
  const RegularizedSolution sol = solve_regularized(F, f_delta, a0, o);
  ZeroStartCheck c;
  c.g0 = sol.V.norm();
  c.bound = (F(HilbertVector::zeros(f_delta.grid())) - f_delta).norm() / a0;
  c.holds = c.g0 <= c.bound * (1.0 + 1e-12);
  return c;
}

HilbertVector newton_flow_euler_step(const NonlinearOperator& F, const HilbertVector& f_delta,
                                     double a, const HilbertVector& u, double h,
                                     double inner_tol) {
  HilbertVector G = F(u);
  G.axpy(a, u);
  G -= f_delta;
  HilbertVector out = u;
  out.axpy(-h, solve_shifted(F.derivative(u), a, G, inner_tol));
  return out;
}

SolveReport flow_newton(const NonlinearOperator& F, const HilbertVector& f_delta, double delta,
                        const FlowConfig& cfg, const HilbertVector& u0) {
  require_kind(cfg, ScheduleKind::NewtonFlow);
  const double tol = cfg.inner_tol;
  return integrate("flow-newton", F, f_delta, delta, cfg, u0,
                   [&](const HilbertVector& u, const HilbertVector&, const HilbertVector& G,
                       double a) { return -solve_shifted(F.derivative(u), a, G, tol); });
}

SolveReport flow_gradient(const NonlinearOperator& F, const HilbertVector& f_delta,
                          double delta, const FlowConfig& cfg, const HilbertVector& u0) {
  require_kind(cfg, ScheduleKind::GradientFlow);
  return integrate("flow-gradient", F, f_delta, delta, cfg, u0,
                   [&](const HilbertVector& u, const HilbertVector&, const HilbertVector& G,
                       double a) {
                     HilbertVector d = F.derivative(u).adjoint_apply(G);
                     d.axpy(a, G);
                     return -d;
                   });
}

SolveReport flow_simple(const NonlinearOperator& F, const HilbertVector& f_delta, double delta,
                        const FlowConfig& cfg, const HilbertVector& u0) {
  require_kind(cfg, ScheduleKind::SimpleFlow);
  return integrate("flow-simple", F, f_delta, delta, cfg, u0,
                   [](const HilbertVector&, const HilbertVector&, const HilbertVector& G,
                      double) { return -G; });
}

}  // namespace dsm
