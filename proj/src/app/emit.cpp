#include "dsm/app/emit.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dsm::app {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json number(double x) {
  // JSON has no inf/nan; they are written as strings.
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

template <class T>
std::string opt(const std::optional<T>& v) {
  return v ? format_double(*v) : std::string();
}

ordered_json solve_json(const SolveRow& r) {
  const SolveReport& s = r.report;
  ordered_json j;
  j["delta_rel"] = number(r.delta_rel);
  j["seed"] = r.seed;
  j["delta"] = number(r.delta);
  j["method"] = s.method;
  j["status"] = std::string(to_string(s.status));
  j["n_stop"] = s.n_stop;
  j["t_stop"] = number(s.t_stop);
  j["residual_at_stop"] = number(s.residual_at_stop);
  j["threshold"] = number(s.threshold);
  j["a_at_stop"] = number(s.a_at_stop);
  j["rejected_steps"] = s.rejected_steps;
  j["M1_used"] = number(s.M1_used);
  j["M1_estimated"] = s.M1_estimated;
  j["rel_error"] = r.rel_error ? number(*r.rel_error) : ordered_json(nullptr);
  return j;
}

}  // namespace

Format format_from_string(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw Error(ErrorKind::ConfigError, "format must be csv or json, got '" + s + "'");
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string emit_solve(const std::vector<SolveRow>& rows, Format f) {
  if (f == Format::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) arr.push_back(solve_json(r));
    return arr.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "delta_rel,seed,delta,method,status,n_stop,t_stop,residual_at_stop,threshold,"
        "a_at_stop,rejected_steps,M1_used,M1_estimated,rel_error\n";
  for (const auto& r : rows) {
    const SolveReport& s = r.report;
    os << format_double(r.delta_rel) << ',' << r.seed << ',' << format_double(r.delta) << ','
       << s.method << ',' << to_string(s.status) << ',' << s.n_stop << ','
       << format_double(s.t_stop) << ',' << format_double(s.residual_at_stop) << ','
       << format_double(s.threshold) << ',' << format_double(s.a_at_stop) << ','
       << s.rejected_steps << ',' << format_double(s.M1_used) << ','
       << (s.M1_estimated ? 1 : 0) << ',' << opt(r.rel_error) << '\n';
  }
  return os.str();
}

std::string emit_solve_history(const std::vector<SolveRow>& rows, Format f) {
  if (f == Format::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json j;
      j["delta_rel"] = number(r.delta_rel);
      j["seed"] = r.seed;
      ordered_json h = ordered_json::array();
      for (const auto& s : r.report.history) h.push_back({number(s.t), number(s.residual)});
      j["history"] = std::move(h);
      arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "delta_rel,seed,t,residual\n";
  for (const auto& r : rows)
    for (const auto& s : r.report.history)
      os << format_double(r.delta_rel) << ',' << r.seed << ',' << format_double(s.t) << ','
         << format_double(s.residual) << '\n';
  return os.str();
}

std::string emit_dp(const std::vector<DPRow>& rows, Format f) {
  auto status = [](DPStatus s) {
    return s == DPStatus::Solved ? "solved" : "already_compatible";
  };
  if (f == Format::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json j;
      j["delta_rel"] = number(r.delta_rel);
      j["seed"] = r.seed;
      j["delta"] = number(r.delta);
      j["status"] = status(r.result.status);
      j["a_delta"] = number(r.result.a_delta);
      j["achieved_residual"] = number(r.result.achieved_residual);
      j["target"] = number(r.result.target);
      j["bracket_evals"] = r.result.bracket_evals;
      j["bisection_steps"] = r.result.bisection_steps;
      j["rel_error"] = r.rel_error ? number(*r.rel_error) : ordered_json(nullptr);
      j["a_analytic"] = r.a_analytic ? number(*r.a_analytic) : ordered_json(nullptr);
      arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "delta_rel,seed,delta,status,a_delta,achieved_residual,target,bracket_evals,"
        "bisection_steps,rel_error,a_analytic\n";
  for (const auto& r : rows)
    os << format_double(r.delta_rel) << ',' << r.seed << ',' << format_double(r.delta) << ','
       << status(r.result.status) << ',' << format_double(r.result.a_delta) << ','
       << format_double(r.result.achieved_residual) << ',' << format_double(r.result.target)
       << ',' << r.result.bracket_evals << ',' << r.result.bisection_steps << ','
       << opt(r.rel_error) << ',' << opt(r.a_analytic) << '\n';
  return os.str();
}

std::string emit_conditions(const ConditionReport& r, Format f) {
  if (f == Format::Json) {
    ordered_json j;
    j["kind"] = std::string(to_string(r.kind));
    j["b"] = number(r.b);
    j["c"] = number(r.c);
    j["d"] = number(r.d);
    j["lambda"] = number(r.lambda);
    j["lambda_auto"] = r.lambda_auto;
    j["passed"] = r.passed;
    ordered_json cs = ordered_json::array();
    for (const auto& c : r.conditions) {
      ordered_json x;
      x["name"] = c.name;
      x["inequality"] = c.inequality;
      x["worst_margin"] = number(c.worst_margin);
      x["at"] = number(c.at);
      x["strict"] = c.strict;
      x["passed"] = c.passed;
      cs.push_back(std::move(x));
    }
    j["conditions"] = std::move(cs);
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "kind,b,c,d,lambda,condition,inequality,worst_margin,at,strict,passed\n";
  for (const auto& c : r.conditions)
    os << to_string(r.kind) << ',' << format_double(r.b) << ',' << format_double(r.c) << ','
       << format_double(r.d) << ',' << format_double(r.lambda) << ',' << c.name << ",\""
       << c.inequality << "\"," << format_double(c.worst_margin) << ','
       << format_double(c.at) << ',' << (c.strict ? 1 : 0) << ',' << (c.passed ? 1 : 0)
       << '\n';
  return os.str();
}

std::string emit_bound(const BoundReport& r, Format f, bool trajectory) {
  if (f == Format::Json) {
    ordered_json j;
    j["holds"] = r.holds;
    j["condition_margin"] = number(r.condition_margin);
    j["condition_at"] = number(r.condition_at);
    j["initial_margin"] = number(r.initial_margin);
    j["min_margin"] = number(r.min_margin);
    j["min_margin_at"] = number(r.min_margin_at);
    if (trajectory) {
      ordered_json tr = ordered_json::array();
      for (std::size_t i = 0; i < r.t.size(); ++i)
        tr.push_back({number(r.t[i]), number(r.g[i]), number(r.bound[i])});
      j["trajectory"] = std::move(tr);
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "holds,condition_margin,condition_at,initial_margin,min_margin,min_margin_at\n"
     << (r.holds ? 1 : 0) << ',' << format_double(r.condition_margin) << ','
     << format_double(r.condition_at) << ',' << format_double(r.initial_margin) << ','
     << format_double(r.min_margin) << ',' << format_double(r.min_margin_at) << '\n';
  if (trajectory) {
    os << "\nt,g,bound\n";
    for (std::size_t i = 0; i < r.t.size(); ++i)
      os << format_double(r.t[i]) << ',' << format_double(r.g[i]) << ','
         << format_double(r.bound[i]) << '\n';
  }
  return os.str();
}

std::string emit_table1(const std::vector<Table1Row>& rows, Format f) {
  if (f == Format::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json j;
      j["delta_rel"] = number(r.delta_rel);
      j["n_iterations"] = number(r.n_iterations);
      j["rel_error"] = number(r.rel_error);
      j["residual_at_stop"] = number(r.residual_at_stop);
      j["a_at_stop"] = number(r.a_at_stop);
      j["seed_count"] = r.seed_count;
      ordered_json runs = ordered_json::array();
      for (const auto& s : r.runs) {
        ordered_json x;
        x["seed"] = s.seed;
        x["delta"] = number(s.delta);
        x["status"] = std::string(to_string(s.status));
        x["n_iterations"] = s.n_iterations;
        x["rel_error"] = number(s.rel_error);
        x["residual_at_stop"] = number(s.residual_at_stop);
        x["a_at_stop"] = number(s.a_at_stop);
        if (!s.error.empty()) x["error"] = s.error;
        runs.push_back(std::move(x));
      }
      j["runs"] = std::move(runs);
      arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "delta_rel,n_iterations,rel_error,residual_at_stop,a_at_stop,seed_count\n";
  for (const auto& r : rows)
    os << format_double(r.delta_rel) << ',' << format_double(r.n_iterations) << ','
       << format_double(r.rel_error) << ',' << format_double(r.residual_at_stop) << ','
       << format_double(r.a_at_stop) << ',' << r.seed_count << '\n';
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path + "'");
}

}  // namespace dsm::app
