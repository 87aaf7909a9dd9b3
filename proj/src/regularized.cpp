#include "dsm/regularized.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dsm {

namespace {

HilbertVector defect(const NonlinearOperator& F, const HilbertVector& f, double a,
                     const HilbertVector& V) {
  HilbertVector g = F(V);
  g.axpy(a, V);
  g -= f;
  return g;
}

[[noreturn]] void fail_convergence(const char* method, int steps, double residual,
                                   double tol, double a) {
  std::ostringstream os;
  os << method << " stopped after " << steps << " steps with residual " << residual
     << " > tol " << tol << " at a=" << a;
  throw Error(ErrorKind::NonConvergence, os.str());
}

RegularizedSolution newton_solve(const NonlinearOperator& F, const HilbertVector& f,
                                 double a, double tol, HilbertVector V, int budget) {
  constexpr double kMinDamping = 1e-4;
  HilbertVector G = defect(F, f, a, V);
  double r = G.norm();
  int k = 0;
  for (; k < budget && r > tol; ++k) {
    const LinearMap J = F.derivative(V);
    const HilbertVector step = solve_shifted(J, a, -G, 1e-10);
    double t = 1.0;
    bool decreased = false;
    while (t >= kMinDamping) {
      HilbertVector trial = V;
      trial.axpy(t, step);
      HilbertVector Gt = defect(F, f, a, trial);
      const double rt = Gt.norm();
      if (rt < r) {
        V = std::move(trial);
        G = std::move(Gt);
        r = rt;
        decreased = true;
        break;
      }
      t *= 0.5;
    }
    if (!decreased) break;  // stagnation at round-off level
  }
  if (r > tol) fail_convergence("damped Newton", k, r, tol, a);
  return {std::move(V), a, r, k};
}

RegularizedSolution relaxation_solve(const NonlinearOperator& F, const HilbertVector& f,
                                     double a, double tol, HilbertVector V, int budget) {
  const double s = 1.0 / (2.0 * a + F.bounds().M1);
  HilbertVector G = defect(F, f, a, V);
  double r = G.norm();
  int k = 0;
  for (; k < budget && r > tol; ++k) {
    V.axpy(-s, G);
    G = defect(F, f, a, V);
    r = G.norm();
    if (!std::isfinite(r)) break;
  }
  if (!(r <= tol)) fail_convergence("relaxation", k, r, tol, a);
  return {std::move(V), a, r, k};
}

}  // namespace

double default_regularized_tol(double a, const HilbertVector& f) {
  return std::max(1e-12, 1e-4 * a * f.norm());
}

RegularizedSolution solve_regularized(const NonlinearOperator& F, const HilbertVector& f,
                                      double a, const RegularizedOptions& opts) {
  if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "a must be positive");
  const double tol = opts.tol.value_or(default_regularized_tol(a, f));
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  HilbertVector V0 = opts.warm_start ? *opts.warm_start : HilbertVector::zeros(f.grid());
  require_same_grid(V0, f);
  if (F.has_derivative())
    return newton_solve(F, f, a, tol, std::move(V0), opts.max_newton_steps);
  return relaxation_solve(F, f, a, tol, std::move(V0), opts.max_relaxation_steps);
}

PhiPsi phi_psi(const NonlinearOperator& F, const HilbertVector& f, double a,
               const RegularizedOptions& opts) {
  PhiPsi out;
  out.solution = solve_regularized(F, f, a, opts);
  out.psi = out.solution.V.norm();
  out.phi = a * out.psi;
  out.residual = (F(out.solution.V) - f).norm();
  return out;
}

Bracket bracket_for_target(const NonlinearOperator& F, const HilbertVector& f,
                           double target, double a_init, const RegularizedOptions& opts) {
  if (!(a_init > 0.0)) throw Error(ErrorKind::InvalidArgument, "a_init must be positive");
  if (!(target > 0.0)) throw Error(ErrorKind::InvalidArgument, "target must be positive");
  const double sup = (F(HilbertVector::zeros(f.grid())) - f).norm();
  if (target >= sup) {
    std::ostringstream os;
    os << "target " << target << " >= ||F(0) - f|| = " << sup;
    throw Error(ErrorKind::NoRoot, os.str());
  }

  RegularizedOptions o = opts;
  Bracket b;
  double a = a_init;
  PhiPsi cur = phi_psi(F, f, a, o);
  ++b.evaluations;
  const bool expand = cur.phi < target;
  for (int k = 0; k < kMaxBracketDoublings; ++k) {
    o.warm_start = cur.solution.V;
    const double a_next = expand ? 2.0 * a : 0.5 * a;
    PhiPsi next = phi_psi(F, f, a_next, o);
    ++b.evaluations;
    if (expand && next.phi >= target) {
      b.a_lo = a;
      b.phi_lo = cur.phi;
      b.V_lo = std::move(cur.solution.V);
      b.a_hi = a_next;
      b.phi_hi = next.phi;
      b.V_hi = std::move(next.solution.V);
      return b;
    }
    if (!expand && next.phi < target) {
      b.a_lo = a_next;
      b.phi_lo = next.phi;
      b.V_lo = std::move(next.solution.V);
      b.a_hi = a;
      b.phi_hi = cur.phi;
      b.V_hi = std::move(cur.solution.V);
      return b;
    }
    a = a_next;
    cur = std::move(next);
  }
  throw Error(ErrorKind::BudgetExceeded, "no bracket within 200 doublings");
}

}  // namespace dsm
