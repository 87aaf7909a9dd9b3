#include "dsm/iterations.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace dsm {

namespace {

constexpr std::int64_t kDefaultNMax = 100000;

void require_kind(const IterConfig& cfg, ScheduleKind expected) {
  if (cfg.schedule.kind() != expected) {
    std::ostringstream os;
    os << "schedule kind " << to_string(cfg.schedule.kind()) << " used with a "
       << to_string(expected) << " solver";
    throw Error(ErrorKind::InvalidConfig, os.str());
  }
}

// Produces u_{n+1} from u_n, F(u_n) and G_n.
using Step = std::function<HilbertVector(std::int64_t n, const HilbertVector& u,
                                         const HilbertVector& G, double a)>;

SolveReport run(const char* method, const NonlinearOperator& F, const HilbertVector& f,
                double delta, const IterConfig& cfg, const HilbertVector& u0,
                const Step& step, SolveReport rep) {
  cfg.validate();
  require_same_grid(u0, f);
  const double thr = cfg.C1 * std::pow(delta, cfg.exponent);
  const std::int64_t n_max = cfg.horizon(delta);
  rep.method = method;
  rep.threshold = thr;

  HilbertVector u = u0;
  HilbertVector Fu = F(u);
  std::int64_t n = 0;
  double r = (Fu - f).norm();
  if (cfg.record_history) rep.history.push_back({0.0, r});
  while (r > thr && n < n_max) {
    const double a = cfg.schedule.a(n);
    HilbertVector G = Fu;
    G.axpy(a, u);
    G -= f;
    u = step(n, u, G, a);
    Fu = F(u);
    ++n;
    r = (Fu - f).norm();
    if (!std::isfinite(r)) {
      std::ostringstream os;
      os << method << " diverged at n=" << n;
      throw Error(ErrorKind::NonConvergence, os.str());
    }
    if (cfg.record_history) rep.history.push_back({static_cast<double>(n), r});
  }
  rep.status = r <= thr ? StopStatus::StoppedByDiscrepancy : StopStatus::ExhaustedHorizon;
  rep.n_stop = n;
  rep.t_stop = static_cast<double>(n);
  rep.residual_at_stop = r;
  rep.a_at_stop = cfg.schedule.a(n);
  rep.u_final = std::move(u);
  return rep;
}

// Resolves M1 and the step rule shared by the gradient and simple schemes.
struct StepRule {
  double M1 = 0.0;
  bool estimated = false;
  std::function<double(std::int64_t)> alpha;
};

StepRule make_rule(const NonlinearOperator& F, const HilbertVector& u0, const IterConfig& cfg,
                   double (*limit)(double, double)) {
  StepRule rule;
  if (cfg.M1) {
    rule.M1 = *cfg.M1;
  } else if (F.bounds().M1 > 0.0) {
    rule.M1 = F.bounds().M1;
  } else {
    rule.M1 = estimate_M1(F, u0);
    rule.estimated = true;
  }
  if (!(rule.M1 >= 0.0) || !std::isfinite(rule.M1))
    throw Error(ErrorKind::InvalidStepSize, "M1 must be a finite nonnegative number");

  // The band's upper endpoint grows as a_n decreases, so n = 0 is the tightest.
  const double upper0 = limit(cfg.schedule.a(0), rule.M1);
  const double floor = cfg.alpha_tilde.value_or(0.5 * upper0);
  if (!(floor > 0.0) || floor > upper0) {
    std::ostringstream os;
    os << "step band [" << floor << ", " << upper0 << "] is empty at n=0 (M1=" << rule.M1
       << ")";
    throw Error(ErrorKind::InvalidStepSize, os.str());
  }
  if (cfg.alpha) {
    const double fixed = *cfg.alpha;
    if (!(fixed >= floor && fixed <= upper0)) {
      std::ostringstream os;
      os << "alpha=" << fixed << " outside the step band [" << floor << ", " << upper0 << "]";
      throw Error(ErrorKind::InvalidStepSize, os.str());
    }
    rule.alpha = [fixed](std::int64_t) { return fixed; };
  } else {
    const DiscreteSchedule s = cfg.schedule;
    const double M1 = rule.M1;
    rule.alpha = [s, M1, limit](std::int64_t n) { return limit(s.a(n), M1); };
  }
  return rule;
}

}  // namespace

void IterConfig::validate() const {
  if (!(C1 > 1.0)) throw Error(ErrorKind::InvalidConfig, "C1 must exceed 1");
  if (!(exponent > 0.0 && exponent <= 1.0))
    throw Error(ErrorKind::InvalidConfig, "exponent must lie in (0, 1]");
  if (n_max && *n_max < 0) throw Error(ErrorKind::InvalidConfig, "n_max must be nonnegative");
  if (y_norm && !(*y_norm > 0.0))
    throw Error(ErrorKind::InvalidConfig, "y_norm must be positive");
  if (!(inner_tol > 0.0)) throw Error(ErrorKind::InvalidConfig, "inner_tol must be positive");
}

std::int64_t IterConfig::horizon(double delta) const {
  if (n_max) return *n_max;
  if (!y_norm) return kDefaultNMax;
  const double C = 0.5 * (C1 + 1.0);
  const double level = delta * (C - 1.0) / *y_norm;
  // a_n = d0 / (d + n)^b >= level  <=>  n <= (d0 / level)^{1/b} - d
  const double n0 =
      std::floor(std::pow(schedule.d0() / level, 1.0 / schedule.b()) - schedule.offset());
  if (!(n0 >= 0.0)) return 10;
  if (n0 > 1e9) return kDefaultNMax;
  return 10 * (static_cast<std::int64_t>(n0) + 1);
}

double gradient_step_limit(double a, double M1) noexcept {
  return 2.0 / (a * a + (M1 + a) * (M1 + a));
}

double simple_step_limit(double a, double M1) noexcept { return 2.0 / (a + (M1 + a)); }

double estimate_M1(const NonlinearOperator& F, const HilbertVector& u) {
  if (F.has_derivative()) return 1.1 * estimate_norm(F.derivative(u));
  const double h = 1e-6 * (1.0 + u.norm());
  auto jv = [&](const HilbertVector& v) {
    HilbertVector p = u, m = u;
    p.axpy(h, v);
    m.axpy(-h, v);
    HilbertVector d = F(p) - F(m);
    d *= 0.5 / h;
    return d;
  };
  return 1.1 * estimate_self_adjoint_radius(jv, u);
}

SolveReport iter_newton(const NonlinearOperator& F, const HilbertVector& f_delta, double delta,
                        const IterConfig& cfg, const HilbertVector& u0) {
  require_kind(cfg, ScheduleKind::NewtonIter);
  const double tol = cfg.inner_tol;
  return run("iter-newton", F, f_delta, delta, cfg, u0,
             [&](std::int64_t, const HilbertVector& u, const HilbertVector& G, double a) {
               HilbertVector next = u;
               next -= solve_shifted(F.derivative(u), a, G, tol);
               return next;
             },
             {});
}

SolveReport iter_gradient(const NonlinearOperator& F, const HilbertVector& f_delta,
                          double delta, const IterConfig& cfg, const HilbertVector& u0) {
  require_kind(cfg, ScheduleKind::GradientIter);
  if (!F.has_derivative())
    throw Error(ErrorKind::NoDerivative, "gradient iteration needs F'");
  const StepRule rule = make_rule(F, u0, cfg, gradient_step_limit);
  SolveReport rep;
  rep.M1_used = rule.M1;
  rep.M1_estimated = rule.estimated;
  return run("iter-gradient", F, f_delta, delta, cfg, u0,
             [&](std::int64_t n, const HilbertVector& u, const HilbertVector& G, double a) {
               HilbertVector d = F.derivative(u).adjoint_apply(G);
               d.axpy(a, G);
               HilbertVector next = u;
               next.axpy(-rule.alpha(n), d);
               return next;
             },
             std::move(rep));
}

SolveReport iter_simple(const NonlinearOperator& F, const HilbertVector& f_delta, double delta,
                        const IterConfig& cfg, const HilbertVector& u0) {
  require_kind(cfg, ScheduleKind::SimpleIter);
  const StepRule rule = make_rule(F, u0, cfg, simple_step_limit);
  SolveReport rep;
  rep.M1_used = rule.M1;
  rep.M1_estimated = rule.estimated;
  return run("iter-simple", F, f_delta, delta, cfg, u0,
             [&](std::int64_t n, const HilbertVector& u, const HilbertVector& G, double) {
               HilbertVector next = u;
               next.axpy(-rule.alpha(n), G);
               return next;
             },
             std::move(rep));
}

}  // namespace dsm
