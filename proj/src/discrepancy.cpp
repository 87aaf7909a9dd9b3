#include "dsm/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dsm {

void DPConfig::validate() const {
  if (!(C > 1.0)) throw Error(ErrorKind::InvalidConfig, "C must exceed 1");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw Error(ErrorKind::InvalidConfig, "gamma must lie in (0, 1]");
  if (!(theta > 0.0)) throw Error(ErrorKind::InvalidConfig, "theta must be positive");
  if (!(dp_tol > 0.0)) throw Error(ErrorKind::InvalidConfig, "dp_tol must be positive");
  if (!(a_init > 0.0)) throw Error(ErrorKind::InvalidConfig, "a_init must be positive");
}

DPResult solve_dp(const NonlinearOperator& F, const HilbertVector& f_delta, double delta,
                  const DPConfig& cfg) {
  cfg.validate();
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  const double target = cfg.C * std::pow(delta, cfg.gamma);
  if (!(target > delta)) {
    std::ostringstream os;
    os << "C delta^gamma = " << target << " does not exceed delta = " << delta;
    throw Error(ErrorKind::InvalidConfig, os.str());
  }

  DPResult out;
  out.target = target;
  const HilbertVector zero = HilbertVector::zeros(f_delta.grid());
  const double r0 = (F(zero) - f_delta).norm();
  if (r0 <= target) {
    out.status = DPStatus::AlreadyCompatible;
    out.a_delta = std::numeric_limits<double>::infinity();
    out.V = zero;
    out.achieved_residual = r0;
    return out;
  }

  // Inner solves must resolve phi well below the bisection tolerance.
  RegularizedOptions opts;
  const double inner_tol = std::max(1e-14 * (1.0 + f_delta.norm()), 1e-2 * cfg.dp_tol * target);
  opts.tol = inner_tol;

  Bracket br = bracket_for_target(F, f_delta, target, cfg.a_init, opts);
  out.bracket_evals = br.evaluations;

  double lo = br.a_lo, hi = br.a_hi;
  HilbertVector V_lo = br.V_lo, V_hi = br.V_hi;
  double best_a = hi;
  HilbertVector best_V = V_hi;
  double best_res = (F(V_hi) - f_delta).norm();
  auto close_enough = [&](double res) {
    return std::abs(res - target) <= cfg.dp_tol * target;
  };

  for (int k = 0; k < cfg.max_bisections && !close_enough(best_res); ++k) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;  // bracket exhausted at double precision
    opts.warm_start = V_hi;
    const PhiPsi p = phi_psi(F, f_delta, mid, opts);
    ++out.bracket_evals;
    ++out.bisection_steps;
    if (std::abs(p.residual - target) < std::abs(best_res - target)) {
      best_a = mid;
      best_V = p.solution.V;
      best_res = p.residual;
    }
    if (p.phi < target) {
      lo = mid;
      V_lo = p.solution.V;
    } else {
      hi = mid;
      V_hi = p.solution.V;
    }
  }
  // A bracket collapsed to rounding level means dp_tol is below what the
  // residual evaluation resolves; the closest point found is the answer.
  const bool collapsed = hi - lo <= 1e-14 * hi;
  if (!close_enough(best_res) && !collapsed) {
    std::ostringstream os;
    os << "bisection ended with residual " << best_res << " vs target " << target;
    throw Error(ErrorKind::NonConvergence, os.str());
  }
  out.a_delta = best_a;
  out.V = std::move(best_V);
  out.achieved_residual = best_res;
  return out;
}

DPResult solve_dp_shifted(const NonlinearOperator& F, const HilbertVector& f_delta,
                          double delta, const DPConfig& cfg, const HilbertVector& u_bar) {
  const NonlinearOperator F1 = F.shifted(u_bar);
  DPResult r = solve_dp(F1, f_delta, delta, cfg);
  r.V += u_bar;
  return r;
}

AcceptanceReport accept_candidate(const NonlinearOperator& F, const HilbertVector& f_delta,
                                  double delta, const HilbertVector& v, double alpha,
                                  const DPConfig& cfg) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
  AcceptanceReport rep;
  const HilbertVector Fv_minus_f = F(v) - f_delta;
  HilbertVector d = Fv_minus_f;
  d.axpy(alpha, v);
  rep.defect = d.norm();
  rep.defect_bound = cfg.theta * delta;
  rep.residual = Fv_minus_f.norm();
  const double scale = std::pow(delta, cfg.gamma);
  rep.window_lo = cfg.lower() * scale;
  rep.window_hi = cfg.upper() * scale;
  rep.defect_ok = rep.defect <= rep.defect_bound;
  rep.window_ok = rep.window_lo <= rep.residual && rep.residual <= rep.window_hi;
  rep.accepted = rep.defect_ok && rep.window_ok;
  rep.hypotheses_ok = cfg.gamma > 0.0 && cfg.gamma < 1.0 && cfg.lower() > 0.0 &&
                      cfg.lower() < cfg.upper() && cfg.theta > 0.0;
  return rep;
}

}  // namespace dsm
