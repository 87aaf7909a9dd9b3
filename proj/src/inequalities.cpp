#include "dsm/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dsm {

namespace {

constexpr double kMuDotStep = 1e-6;
constexpr int kRandomStates = 100;

double slack(double lhs, double rhs, bool analytic) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return (analytic ? 1e-12 : 1e-8) * scale;
}

[[noreturn]] void precondition(const std::string& what, double at, double margin) {
  std::ostringstream os;
  os << what << " fails at " << at << " (margin " << margin << ")";
  throw Error(ErrorKind::PreconditionFailed, os.str());
}

[[noreturn]] void violated(double at, double g, double bound) {
  std::ostringstream os;
  os << "g = " << g << " reaches the bound 1/mu = " << bound << " at " << at;
  throw Error(ErrorKind::BoundViolated, os.str());
}

std::vector<double> sample_times(double tau0, double T) {
  std::vector<double> ts;
  ts.reserve(kConditionSamples + 2);
  ts.push_back(tau0);
  for (int i = 1; i <= kConditionSamples; ++i)
    ts.push_back(tau0 + (T - tau0) * i / (kConditionSamples + 1));
  ts.push_back(T);
  return ts;
}

// gamma - mu'/mu
double decay_bracket(const ContinuousInequality& inst, double t) {
  return inst.gamma(t) - mu_derivative(inst, t) / inst.mu(t);
}

// Checks the hypotheses of the continuous bound, filling the margins.
void check_continuous(const ContinuousInequality& inst, BoundReport& rep) {
  if (!(inst.alpha && inst.beta && inst.gamma && inst.mu))
    throw Error(ErrorKind::InvalidArgument, "alpha, beta, gamma and mu are required");
  if (!(inst.p > 1.0)) throw Error(ErrorKind::InvalidArgument, "p must exceed 1");
  if (!(inst.T > inst.tau0)) throw Error(ErrorKind::InvalidArgument, "T must exceed tau0");
  if (!(inst.g0 >= 0.0)) throw Error(ErrorKind::InvalidArgument, "g0 must be nonnegative");
  const bool analytic = static_cast<bool>(inst.mu_dot);

  rep.condition_margin = std::numeric_limits<double>::infinity();
  for (double t : sample_times(inst.tau0, inst.T)) {
    const double mu = inst.mu(t), al = inst.alpha(t);
    if (!(mu > 0.0)) precondition("mu > 0", t, mu);
    if (al < 0.0) precondition("alpha >= 0", t, al);
    const double lhs = al / std::pow(mu, inst.p) + inst.beta(t);
    const double rhs = decay_bracket(inst, t) / mu;
    const double m = rhs - lhs;
    if (m < rep.condition_margin) {
      rep.condition_margin = m;
      rep.condition_at = t;
    }
    if (m < -slack(lhs, rhs, analytic))
      precondition("alpha/mu^p + beta <= (gamma - mu'/mu)/mu", t, m);
  }
  rep.initial_margin = 1.0 - inst.mu(inst.tau0) * inst.g0;
  if (!(rep.initial_margin > 0.0)) precondition("mu(tau0) g0 < 1", inst.tau0, rep.initial_margin);
}

// Records (t, g) against 1/mu(t) and throws on violation.
void record(BoundReport& rep, double t, double g, double mu, bool strict) {
  const double bound = 1.0 / mu;
  rep.t.push_back(t);
  rep.g.push_back(g);
  rep.bound.push_back(bound);
  const double m = bound - g;
  if (rep.t.size() == 1 || m < rep.min_margin) {
    rep.min_margin = m;
    rep.min_margin_at = t;
  }
  const bool ok = strict ? (g < bound) : (g <= bound * (1.0 + 1e-12));
  if (!ok || !std::isfinite(g)) violated(t, g, bound);
}

}  // namespace

double mu_derivative(const ContinuousInequality& inst, double t) {
  if (inst.mu_dot) return inst.mu_dot(t);
  const double h = kMuDotStep;
  if (t - h < inst.tau0)  // second-order one-sided difference at the left end
    return (-3.0 * inst.mu(t) + 4.0 * inst.mu(t + h) - inst.mu(t + 2.0 * h)) / (2.0 * h);
  return (inst.mu(t + h) - inst.mu(t - h)) / (2.0 * h);
}

BoundReport bound_continuous(const ContinuousInequality& inst, int n_steps) {
  if (n_steps < 1) throw Error(ErrorKind::InvalidArgument, "n_steps must be positive");
  BoundReport rep;
  check_continuous(inst, rep);

  const double p = inst.p;
  auto rhs = [&](double t, double g) {
    return -inst.gamma(t) * g + inst.alpha(t) * std::pow(std::max(g, 0.0), p) + inst.beta(t);
  };
  const double dt = (inst.T - inst.tau0) / n_steps;
  double g = inst.g0;
  record(rep, inst.tau0, g, inst.mu(inst.tau0), true);
  for (int i = 0; i < n_steps; ++i) {
    const double t = inst.tau0 + dt * i;
    const double k1 = rhs(t, g);
    const double k2 = rhs(t + 0.5 * dt, g + 0.5 * dt * k1);
    const double k3 = rhs(t + 0.5 * dt, g + 0.5 * dt * k2);
    const double k4 = rhs(t + dt, g + dt * k3);
    g += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double tn = i + 1 == n_steps ? inst.T : inst.tau0 + dt * (i + 1);
    record(rep, tn, g, inst.mu(tn), true);
  }
  rep.holds = true;
  return rep;
}

BoundReport bound_discrete(const DiscreteInequality& inst) {
  if (!(inst.alpha && inst.beta && inst.gamma && inst.mu && inst.h))
    throw Error(ErrorKind::InvalidArgument, "alpha, beta, gamma, mu and h are required");
  if (!(inst.p > 1.0)) throw Error(ErrorKind::InvalidArgument, "p must exceed 1");
  if (inst.N < 0) throw Error(ErrorKind::InvalidArgument, "N must be nonnegative");

  BoundReport rep;
  rep.condition_margin = std::numeric_limits<double>::infinity();
  for (std::int64_t n = 0; n < inst.N; ++n) {
    const double x = static_cast<double>(n);
    const double h = inst.h(n), ga = inst.gamma(n), al = inst.alpha(n), be = inst.beta(n);
    const double mu = inst.mu(n), mu1 = inst.mu(n + 1);
    if (!(h > 0.0)) precondition("h_n > 0", x, h);
    if (!(h * ga > 0.0 && h * ga < 1.0)) precondition("0 < h_n gamma_n < 1", x, h * ga);
    if (al < 0.0) precondition("alpha_n >= 0", x, al);
    if (!(mu > 0.0)) precondition("mu_n > 0", x, mu);
    if (mu1 < mu) precondition("mu_{n+1} >= mu_n", x, mu1 - mu);
    const double lhs = al / std::pow(mu, inst.p) + be;
    const double rhs = (ga - (mu1 - mu) / (mu * h)) / mu;
    const double m = rhs - lhs;
    if (m < rep.condition_margin) {
      rep.condition_margin = m;
      rep.condition_at = x;
    }
    if (m < -slack(lhs, rhs, true))
      precondition("alpha_n/mu_n^p + beta_n <= (gamma_n - (mu_{n+1} - mu_n)/(mu_n h_n))/mu_n",
                   x, m);
  }
  const double mu0 = inst.mu(0);
  if (!(mu0 > 0.0)) precondition("mu_0 > 0", 0.0, mu0);
  rep.initial_margin = 1.0 / mu0 - inst.g0;
  if (!(inst.g0 >= 0.0) || rep.initial_margin < 0.0)
    precondition("0 <= g_0 <= 1/mu_0", 0.0, rep.initial_margin);

  double g = inst.g0;
  record(rep, 0.0, g, mu0, false);
  for (std::int64_t n = 0; n < inst.N; ++n) {
    const double h = inst.h(n);
    g = g * (1.0 - h * inst.gamma(n)) + inst.alpha(n) * h * std::pow(g, inst.p) +
        h * inst.beta(n);
    record(rep, static_cast<double>(n + 1), g, inst.mu(n + 1), false);
  }
  rep.holds = true;
  return rep;
}

QuadraticConditions check_quadratic_conditions(const ContinuousInequality& inst, double tol) {
  QuadraticConditions q;
  q.alpha_margin = q.beta_margin = q.general_margin = std::numeric_limits<double>::infinity();
  for (double t : sample_times(inst.tau0, inst.T)) {
    const double mu = inst.mu(t), br = decay_bracket(inst, t);
    const double al = inst.alpha(t), be = inst.beta(t);
    q.alpha_margin = std::min({q.alpha_margin, 0.5 * mu * br - al, al});
    q.beta_margin = std::min(q.beta_margin, br / (2.0 * mu) - be);
    q.general_margin = std::min(q.general_margin, br / mu - (al / (mu * mu) + be));
  }
  q.initial_margin = 1.0 - inst.mu(inst.tau0) * inst.g0;
  q.passed = q.alpha_margin >= -tol && q.beta_margin >= -tol && q.initial_margin > 0.0;
  q.implies_general = !q.passed || q.general_margin >= -2.0 * tol;
  return q;
}

EvolutionReport evolution_norm_bound(const LinearMap& A, const EvolutionTerm& h,
                                     const Forcing& f, const HilbertVector& u0,
                                     ContinuousInequality inst, double T, int n_steps,
                                     std::uint64_t seed) {
  if (n_steps < 1) throw Error(ErrorKind::InvalidArgument, "n_steps must be positive");
  inst.g0 = u0.norm();
  inst.T = T;
  EvolutionReport out;
  check_continuous(inst, out.bound);

  const double p = inst.p;
  out.dissipation_margin = out.growth_margin = out.forcing_margin =
      std::numeric_limits<double>::infinity();
  auto check_state = [&](double t, const HilbertVector& u) {
    const double n2 = inner(u, u), nu = std::sqrt(n2);
    const double au = inner(A.apply(u), u);
    const double dm = -inst.gamma(t) * n2 - au;
    out.dissipation_margin = std::min(out.dissipation_margin, dm);
    if (dm < -slack(au, inst.gamma(t) * n2, true))
      precondition("<Au, u> <= -gamma ||u||^2", t, dm);
    const double hu = inner(h(t, u), u), bound = inst.alpha(t) * std::pow(nu, 1.0 + p);
    out.growth_margin = std::min(out.growth_margin, bound - hu);
    if (bound - hu < -slack(hu, bound, true))
      precondition("<h(t, u), u> <= alpha ||u||^{1+p}", t, bound - hu);
  };

  // Hypotheses on the forcing at every sample, and on random states of norm
  // up to the bound at a subset of samples.
  const std::vector<double> ts = sample_times(inst.tau0, T);
  Rng rng(seed);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t = ts[i];
    const double fn = f(t).norm(), fm = inst.beta(t) - fn;
    out.forcing_margin = std::min(out.forcing_margin, fm);
    if (fm < -slack(fn, inst.beta(t), true)) precondition("||f(t)|| <= beta(t)", t, fm);
    if (i % (ts.size() / kRandomStates + 1) == 0) {
      HilbertVector u = random_direction(u0, rng.next_u64());
      u *= rng.uniform() / inst.mu(t);
      check_state(t, u);
    }
  }

  auto field = [&](double t, const HilbertVector& u) {
    HilbertVector r = A.apply(u);
    r += h(t, u);
    r += f(t);
    return r;
  };
  const double dt = (T - inst.tau0) / n_steps;
  HilbertVector u = u0;
  record(out.bound, inst.tau0, u.norm(), inst.mu(inst.tau0), true);
  check_state(inst.tau0, u);
  for (int i = 0; i < n_steps; ++i) {
    const double t = inst.tau0 + dt * i;
    const HilbertVector k1 = field(t, u);
    const HilbertVector k2 = field(t + 0.5 * dt, lincomb(1.0, u, 0.5 * dt, k1));
    const HilbertVector k3 = field(t + 0.5 * dt, lincomb(1.0, u, 0.5 * dt, k2));
    const HilbertVector k4 = field(t + dt, lincomb(1.0, u, dt, k3));
    u.axpy(dt / 6.0, k1);
    u.axpy(dt / 3.0, k2);
    u.axpy(dt / 3.0, k3);
    u.axpy(dt / 6.0, k4);
    const double tn = i + 1 == n_steps ? T : inst.tau0 + dt * (i + 1);
    check_state(tn, u);
    record(out.bound, tn, u.norm(), inst.mu(tn), true);
  }
  out.bound.holds = true;
  out.u_final = std::move(u);
  return out;
}

}  // namespace dsm
