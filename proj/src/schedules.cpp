#include "dsm/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace dsm {

namespace {

constexpr int kLogSamples = 1000;
constexpr int kLambdaExpMin = -40;
constexpr int kLambdaExpMax = 40;
constexpr int kScaleExpMax = 20;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

void check_range(bool ok, const std::string& what, double margin, bool boundary = false) {
  if (!ok) throw ConstraintViolated(what, margin, boundary);
}

double max_b(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::NewtonFlow:
    case ScheduleKind::NewtonIter:
      return 1.0;
    case ScheduleKind::GradientFlow:
    case ScheduleKind::GradientIter:
      return 0.25;
    case ScheduleKind::SimpleFlow:
    case ScheduleKind::SimpleIter:
      return 0.5;
  }
  return 1.0;
}

void check_exponent(ScheduleKind kind, double b) {
  check_range(b > 0.0, "b > 0", b);
  const double hi = max_b(kind);
  check_range(b <= hi, "b <= " + fmt(hi), hi - b);
}

// Accumulates the worst (smallest) margin of one inequality over samples.
struct Tracker {
  ConditionResult r;
  bool seen = false;

  Tracker(std::string name, std::string inequality, bool strict) {
    r.name = std::move(name);
    r.inequality = std::move(inequality);
    r.strict = strict;
    r.worst_margin = std::numeric_limits<double>::infinity();
  }
  void add(double lhs, double rhs, double at) {
    double m = rhs - lhs;
    if (std::isnan(m)) m = -std::numeric_limits<double>::infinity();
    if (!seen || m < r.worst_margin) {
      r.worst_margin = m;
      r.at = at;
      seen = true;
    }
  }
  ConditionResult finish() {
    r.passed = r.strict ? r.worst_margin > 0.0 : r.worst_margin >= 0.0;
    return r;
  }
};

bool all_pass(const std::vector<ConditionResult>& cs) {
  return std::all_of(cs.begin(), cs.end(), [](const ConditionResult& c) { return c.passed; });
}

using Evaluator = std::function<std::vector<ConditionResult>(double lambda)>;

// Picks lambda as described in validate_conditions and assembles the report.
ConditionReport finish_report(ScheduleKind kind, double b, double c, double d,
                              const ValidationParams& p, const Evaluator& eval) {
  ConditionReport rep;
  rep.kind = kind;
  rep.b = b;
  rep.c = c;
  rep.d = d;
  const double floor = p.y_norm > 0.0 ? p.M1 / p.y_norm : 0.0;
  if (p.lambda > 0.0) {
    rep.lambda = p.lambda;
    rep.conditions = eval(p.lambda);
  } else {
    rep.lambda_auto = true;
    bool found = false;
    for (int k = kLambdaExpMin; k <= kLambdaExpMax && !found; ++k) {
      const double lam = std::max(floor, std::ldexp(1.0, k));
      auto cs = eval(lam);
      if (all_pass(cs)) {
        rep.lambda = lam;
        rep.conditions = std::move(cs);
        found = true;
      }
    }
    if (!found) {
      rep.lambda = floor > 0.0 ? floor : 1.0;
      rep.conditions = eval(rep.lambda);
    }
  }
  rep.passed = all_pass(rep.conditions);
  return rep;
}

ConditionResult lambda_lower(const ValidationParams& p, double lambda) {
  Tracker t("lambda_lower", "M1/||y|| <= lambda", false);
  t.add(p.y_norm > 0.0 ? p.M1 / p.y_norm : std::numeric_limits<double>::infinity(), lambda,
        0.0);
  return t.finish();
}

}  // namespace

std::string_view to_string(ScheduleKind kind) noexcept {
  switch (kind) {
    case ScheduleKind::NewtonFlow: return "newton_flow";
    case ScheduleKind::GradientFlow: return "gradient_flow";
    case ScheduleKind::SimpleFlow: return "simple_flow";
    case ScheduleKind::NewtonIter: return "newton_iter";
    case ScheduleKind::GradientIter: return "gradient_iter";
    case ScheduleKind::SimpleIter: return "simple_iter";
  }
  return "unknown";
}

ScheduleKind schedule_kind_from_string(std::string_view name) {
  for (ScheduleKind k : {ScheduleKind::NewtonFlow, ScheduleKind::GradientFlow,
                         ScheduleKind::SimpleFlow, ScheduleKind::NewtonIter,
                         ScheduleKind::GradientIter, ScheduleKind::SimpleIter}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown schedule kind '" + std::string(name) + "'");
}

bool is_continuous(ScheduleKind kind) noexcept {
  return kind == ScheduleKind::NewtonFlow || kind == ScheduleKind::GradientFlow ||
         kind == ScheduleKind::SimpleFlow;
}

ConstraintViolated::ConstraintViolated(std::string condition, double margin, bool boundary)
    : Error(ErrorKind::ConstraintViolated,
            condition + " fails, margin " + fmt(margin) +
                (boundary ? " (boundary case: equality where strict is required)" : "")),
      condition_(std::move(condition)),
      margin_(margin),
      boundary_(boundary) {}

double ContinuousSchedule::a(double t) const { return d_ / std::pow(c_ + t, b_); }

double ContinuousSchedule::a_dot(double t) const {
  return -b_ * d_ / std::pow(c_ + t, b_ + 1.0);
}

double ContinuousSchedule::time_to_reach(double level) const {
  if (!(level > 0.0)) return std::numeric_limits<double>::infinity();
  // d / (c+t)^b = level  <=>  c + t = (d / level)^{1/b}
  const double t = std::pow(d_ / level, 1.0 / b_) - c_;
  return std::max(0.0, t);
}

double DiscreteSchedule::a(std::int64_t n) const {
  return d0_ / std::pow(offset_ + static_cast<double>(n), b_);
}

ContinuousSchedule make_continuous(ScheduleKind kind, double b, double c, double d) {
  if (!is_continuous(kind))
    throw Error(ErrorKind::InvalidArgument,
                std::string(to_string(kind)) + " is not a continuous schedule kind");
  check_exponent(kind, b);
  check_range(c > 0.0, "c > 0", c);
  check_range(d > 0.0, "d > 0", d);
  switch (kind) {
    case ScheduleKind::NewtonFlow: {
      const double m = c - 6.0 * b;
      check_range(m > 0.0, "c > 6b", m, m == 0.0);
      break;
    }
    case ScheduleKind::GradientFlow: {
      check_range(c >= 1.0, "c >= 1", c - 1.0);
      const double m = d * d * std::pow(c, 1.0 - 2.0 * b) - 6.0 * b;
      check_range(m >= 0.0, "d^2 c^(1-2b) >= 6b", m);
      break;
    }
    case ScheduleKind::SimpleFlow: {
      check_range(c >= 1.0, "c >= 1", c - 1.0);
      const double m = d * std::pow(c, 1.0 - b) - 6.0 * b;
      check_range(m >= 0.0, "d c^(1-b) >= 6b", m);
      break;
    }
    default:
      break;
  }
  return ContinuousSchedule(kind, b, c, d);
}

DiscreteSchedule make_discrete(ScheduleKind kind, double b, double offset, double d0) {
  if (is_continuous(kind))
    throw Error(ErrorKind::InvalidArgument,
                std::string(to_string(kind)) + " is not a discrete schedule kind");
  check_exponent(kind, b);
  check_range(offset >= 1.0, "d >= 1", offset - 1.0);
  check_range(d0 > 0.0, "d0 > 0", d0);
  return DiscreteSchedule(kind, b, offset, d0);
}

DiscreteSchedule heuristic_newton_schedule(double C0, double delta, double exponent) {
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  return make_discrete(ScheduleKind::NewtonIter, 1.0, 1.0, C0 * std::pow(delta, exponent));
}

const ConditionResult* ConditionReport::find(std::string_view name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<double> validation_times(double horizon) {
  std::vector<double> ts;
  ts.reserve(kLogSamples + 1);
  ts.push_back(0.0);
  if (!(horizon > 0.0)) return ts;
  // log-spaced on [horizon * 1e-6, horizon]
  const double lo = std::log(horizon * 1e-6), hi = std::log(horizon);
  for (int i = 0; i < kLogSamples; ++i)
    ts.push_back(std::exp(lo + (hi - lo) * i / (kLogSamples - 1)));
  return ts;
}

ConditionReport validate_conditions(const ContinuousSchedule& s, const ValidationParams& p) {
  if (!(p.horizon > 0.0) || !std::isfinite(p.horizon))
    throw Error(ErrorKind::InvalidArgument, "horizon must be positive and finite");
  const std::vector<double> ts = validation_times(p.horizon);
  const double a0 = s.a(0.0);

  Evaluator eval = [&](double lam) {
    std::vector<ConditionResult> out;
    out.push_back(lambda_lower(p, lam));
    switch (s.kind()) {
      case ScheduleKind::NewtonFlow: {
        Tracker bracket("rate_bracket", "|a'|/a < 1", true);
        Tracker c0t("drift_c0", "c0/a <= lambda/(2a) (1 - |a'|/a)", false);
        Tracker c1t("drift_c1", "c1 |a'|/a <= a/(2 lambda) (1 - |a'|/a)", false);
        for (double t : ts) {
          const double a = s.a(t), r = std::abs(s.a_dot(t)) / a;
          bracket.add(r, 1.0, t);
          c0t.add(p.c0 / a, lam / (2.0 * a) * (1.0 - r), t);
          c1t.add(p.c1 * r, a / (2.0 * lam) * (1.0 - r), t);
        }
        Tracker init("initial_residual", "||F(0) - f_delta|| <= a(0)^2/lambda", false);
        init.add(p.residual0, a0 * a0 / lam, 0.0);
        for (Tracker* t : {&bracket, &c0t, &c1t, &init}) out.push_back(t->finish());
        break;
      }
      case ScheduleKind::GradientFlow: {
        Tracker rate("rate_bound", "|a'| <= a^3/4", false);
        Tracker c0t("drift_c0", "c0 (M1 + a) <= lambda/(2a^2) (a^2 - 2|a'|/a)", false);
        Tracker c1t("drift_c1", "c1 |a'|/a <= a^2/(2 lambda) (a^2 - 2|a'|/a)", false);
        for (double t : ts) {
          const double a = s.a(t), ad = std::abs(s.a_dot(t));
          const double br = a * a - 2.0 * ad / a;
          rate.add(ad, a * a * a / 4.0, t);
          c0t.add(p.c0 * (p.M1 + a), lam / (2.0 * a * a) * br, t);
          c1t.add(p.c1 * ad / a, a * a / (2.0 * lam) * br, t);
        }
        Tracker init("initial_gap", "lambda g(0)/a(0)^2 < 1", true);
        init.add(lam * p.g0 / (a0 * a0), 1.0, 0.0);
        for (Tracker* t : {&rate, &c0t, &c1t, &init}) out.push_back(t->finish());
        break;
      }
      case ScheduleKind::SimpleFlow: {
        Tracker rate("rate_bound", "|a'| <= a^2/2", false);
        Tracker c0t("drift_c0", "0 <= lambda/(2a) (a - |a'|/a)", false);
        Tracker c1t("drift_c1", "c1 |a'|/a <= a/(2 lambda) (a - |a'|/a)", false);
        for (double t : ts) {
          const double a = s.a(t), ad = std::abs(s.a_dot(t));
          const double br = a - ad / a;
          rate.add(ad, a * a / 2.0, t);
          c0t.add(0.0, lam / (2.0 * a) * br, t);
          c1t.add(p.c1 * ad / a, a / (2.0 * lam) * br, t);
        }
        Tracker init("initial_gap", "lambda g(0)/a(0) < 1", true);
        init.add(lam * p.g0 / a0, 1.0, 0.0);
        for (Tracker* t : {&rate, &c0t, &c1t, &init}) out.push_back(t->finish());
        break;
      }
      default:
        break;
    }
    return out;
  };
  return finish_report(s.kind(), s.b(), s.c(), s.d(), p, eval);
}

ConditionReport validate_conditions(const DiscreteSchedule& s, const ValidationParams& p) {
  if (!(p.horizon > 0.0) || !std::isfinite(p.horizon))
    throw Error(ErrorKind::InvalidArgument, "horizon must be positive and finite");
  const auto n_max = static_cast<std::int64_t>(std::floor(p.horizon));
  std::vector<double> as(static_cast<std::size_t>(n_max) + 2);
  for (std::int64_t n = 0; n <= n_max + 1; ++n) as[static_cast<std::size_t>(n)] = s.a(n);
  const double a0 = as[0];
  // alpha_tilde <= 0 takes the solvers' default floor, half the step band's
  // upper endpoint at n = 0 where the band is narrowest.
  double alpha_tilde = p.alpha_tilde;
  if (!(alpha_tilde > 0.0)) {
    if (s.kind() == ScheduleKind::GradientIter)
      alpha_tilde = 1.0 / (a0 * a0 + (p.M1 + a0) * (p.M1 + a0));
    else if (s.kind() == ScheduleKind::SimpleIter)
      alpha_tilde = 1.0 / (2.0 * a0 + p.M1);
  }

  Evaluator eval = [&](double lam) {
    std::vector<ConditionResult> out;
    out.push_back(lambda_lower(p, lam));
    Tracker ratio("ratio", "a_n <= 2 a_{n+1}", false);
    for (std::int64_t n = 0; n <= n_max; ++n)
      ratio.add(as[n], 2.0 * as[n + 1], static_cast<double>(n));
    out.push_back(ratio.finish());

    switch (s.kind()) {
      case ScheduleKind::NewtonIter: {
        Tracker init("initial_residual", "||f_delta - F(0)|| <= a_0^2/lambda", false);
        init.add(p.residual0, a0 * a0 / lam, 0.0);
        // (a_n - a_{n+1})/a_{n+1}^2 <= 1/(2 c1 lambda), multiplied through so c1 = 0 is allowed
        Tracker step("step_c1", "2 c1 lambda (a_n - a_{n+1}) <= a_{n+1}^2", false);
        Tracker drift("drift", "c0 a_n/lambda^2 + c1 (a_n - a_{n+1})/a_{n+1} <= a_{n+1}/lambda",
                      false);
        for (std::int64_t n = 0; n <= n_max; ++n) {
          const double an = as[n], an1 = as[n + 1], x = static_cast<double>(n);
          step.add(2.0 * p.c1 * lam * (an - an1), an1 * an1, x);
          drift.add(p.c0 * an / (lam * lam) + p.c1 * (an - an1) / an1, an1 / lam, x);
        }
        for (Tracker* t : {&init, &step, &drift}) out.push_back(t->finish());
        break;
      }
      case ScheduleKind::GradientIter: {
        Tracker init("initial_residual", "||f_delta - F(0)|| <= a_0^3/lambda", false);
        init.add(p.residual0, a0 * a0 * a0 / lam, 0.0);
        Tracker c0t("drift_c0", "c0 (M1 + a_0)/lambda <= 1/2", false);
        c0t.add(p.c0 * (p.M1 + a0) / lam, 0.5, 0.0);
        Tracker drift("drift",
                      "a_n^2/lambda - alpha~ a_n^4/(2 lambda) + c1 (a_n - a_{n+1})/a_{n+1}"
                      " <= a_{n+1}^2/lambda",
                      false);
        for (std::int64_t n = 0; n <= n_max; ++n) {
          const double an = as[n], an1 = as[n + 1];
          drift.add(an * an / lam - alpha_tilde * std::pow(an, 4) / (2.0 * lam) +
                        p.c1 * (an - an1) / an1,
                    an1 * an1 / lam, static_cast<double>(n));
        }
        for (Tracker* t : {&init, &c0t, &drift}) out.push_back(t->finish());
        break;
      }
      case ScheduleKind::SimpleIter: {
        Tracker init("initial_residual", "||f_delta - F(0)|| <= a_0^2/lambda", false);
        init.add(p.residual0, a0 * a0 / lam, 0.0);
        Tracker drift("drift",
                      "a_n/lambda - alpha~ a_n^2/lambda + c1 (a_n - a_{n+1})/a_{n+1}"
                      " <= a_{n+1}/lambda",
                      false);
        for (std::int64_t n = 0; n <= n_max; ++n) {
          const double an = as[n], an1 = as[n + 1];
          drift.add(an / lam - alpha_tilde * an * an / lam + p.c1 * (an - an1) / an1,
                    an1 / lam, static_cast<double>(n));
        }
        for (Tracker* t : {&init, &drift}) out.push_back(t->finish());
        break;
      }
      default:
        break;
    }
    return out;
  };
  return finish_report(s.kind(), s.b(), s.offset(), s.d0(), p, eval);
}

ScaleSearch search_scale(ScheduleKind kind, double b, double c, const ValidationParams& p) {
  ScaleSearch out;
  for (int k = 0; k <= kScaleExpMax; ++k) {
    const double d = std::ldexp(1.0, k);
    ConditionReport rep;
    try {
      if (is_continuous(kind))
        rep = validate_conditions(make_continuous(kind, b, c, d), p);
      else
        rep = validate_conditions(make_discrete(kind, b, c, d), p);
    } catch (const ConstraintViolated&) {
      continue;  // construction constraint depends on d; try the next scale
    }
    out.report = rep;
    out.d = d;
    if (rep.passed) {
      out.found = true;
      return out;
    }
  }
  return out;
}

}  // namespace dsm
