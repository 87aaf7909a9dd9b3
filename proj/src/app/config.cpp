#include "dsm/app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dsm::app {

using nlohmann::json;

namespace {

const std::set<std::string> kMethods{"dp",           "flow-newton",   "flow-gradient",
                                     "flow-simple",  "iter-newton",   "iter-gradient",
                                     "iter-simple"};

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void only_keys(const json& obj, const std::string& prefix, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError(prefix, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    (void)v;
    if (!allowed.count(k)) throw ConfigError(join(prefix, k), "unknown key");
  }
}

template <class T>
void read(const json& obj, const std::string& prefix, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(join(prefix, key), std::string("wrong type: ") + e.what());
  }
}

template <class T>
void read(const json& obj, const std::string& prefix, const char* key, std::optional<T>& out) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  T v{};
  read(obj, prefix, key, v);
  out = v;
}

void read_function(const json& obj, const std::string& prefix, const char* key,
                   FunctionSpec& out) {
  if (!obj.contains(key)) return;
  const json& f = obj.at(key);
  const std::string p = join(prefix, key);
  if (f.is_number()) {
    out = FunctionSpec{"const", f.get<double>(), 0.0, 1.0};
    return;
  }
  only_keys(f, p, {"form", "A", "k", "c"});
  read(f, p, "form", out.form);
  read(f, p, "A", out.A);
  read(f, p, "k", out.k);
  read(f, p, "c", out.c);
  if (out.form != "const" && out.form != "exp" && out.form != "power")
    throw ConfigError(join(p, "form"), "must be const, exp or power");
}

json function_json(const FunctionSpec& f) {
  return json{{"form", f.form}, {"A", f.A}, {"k", f.k}, {"c", f.c}};
}

int line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& message, int line)
    : Error(ErrorKind::ConfigError,
            (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                (key.empty() ? message : key + ": " + message)),
      key_(std::move(key)),
      line_(line) {}

double FunctionSpec::operator()(double t) const {
  if (form == "exp") return A * std::exp(k * t);
  if (form == "power") return A * std::pow(c + t, k);
  return A;
}

double FunctionSpec::derivative(double t) const {
  if (form == "exp") return A * k * std::exp(k * t);
  if (form == "power") return A * k * std::pow(c + t, k - 1.0);
  return 0.0;
}

void ExperimentConfig::validate() const {
  require(problem.kind == "hammerstein" || problem.kind == "rank_one" ||
              problem.kind == "synthetic",
          "problem.kind", "must be hammerstein, rank_one or synthetic");
  require(problem.N >= 2, "problem.N", "must be at least 2");
  require(problem.norm == "nodal" || problem.norm == "l2" || problem.norm == "euclidean",
          "problem.norm", "must be nodal, l2 or euclidean");
  require(problem.dim >= 1, "problem.dim", "must be positive");
  require(kMethods.count(method) > 0, "method", "unknown method '" + method + "'");
  require(C > 1.0, "C", "C must exceed 1");
  require(C1 > 1.0, "C1", "C1 must exceed 1");
  require(gamma > 0.0 && gamma <= 1.0, "gamma", "must lie in (0, 1]");
  require(zeta > 0.0 && zeta <= 1.0, "zeta", "must lie in (0, 1]");
  require(theta > 0.0, "theta", "must be positive");
  require(dp_tol > 0.0, "dp_tol", "must be positive");
  require(!delta_rel.empty(), "delta_rel", "must not be empty");
  for (double d : delta_rel) require(d > 0.0, "delta_rel", "entries must be positive");
  require(!seeds.empty(), "seeds", "must not be empty");
  require(step_min > 0.0 && step_init >= step_min && step_max >= step_min, "step_min",
          "need 0 < step_min <= step_init, step_max");
  require(!t_max || *t_max > 0.0, "t_max", "must be positive");
  require(!n_max || *n_max >= 0, "n_max", "must be nonnegative");
  require(!M1 || *M1 >= 0.0, "M1", "must be nonnegative");
  require(!alpha || *alpha > 0.0, "alpha", "must be positive");
  require(schedule.b > 0.0, "schedule.b", "must be positive");
  require(schedule.c > 0.0, "schedule.c", "must be positive");
  require(!schedule.d || *schedule.d > 0.0, "schedule.d", "must be positive");
  require(schedule.C0 > 0.0, "schedule.C0", "must be positive");
  require(validation.y_norm > 0.0, "validation.y_norm", "must be positive");
  require(validation.horizon > 0.0 && std::isfinite(validation.horizon), "validation.horizon",
          "must be positive and finite");
  require(validation.M1 >= 0.0 && validation.c0 >= 0.0 && validation.c1 >= 0.0 &&
              validation.residual0 >= 0.0 && validation.alpha_tilde >= 0.0 &&
              validation.g0 >= 0.0,
          "validation", "constants must be nonnegative");
  require(inequality.mode == "continuous" || inequality.mode == "discrete", "inequality.mode",
          "must be continuous or discrete");
  require(inequality.p > 1.0, "inequality.p", "must exceed 1");
  require(inequality.n_steps >= 1, "inequality.n_steps", "must be positive");
  require(inequality.N >= 0, "inequality.N", "must be nonnegative");
  require(format == "csv" || format == "json", "format", "must be csv or json");
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", e.what(), line_of(text, e.byte));
  }
  ExperimentConfig c;
  only_keys(j, "",
            {"problem", "method", "schedule", "C", "C1", "gamma", "zeta", "theta", "dp_tol",
             "delta_rel", "seeds", "step_init", "step_min", "step_max", "t_max", "n_max", "M1",
             "alpha", "validation", "inequality", "out_dir", "format", "history"});

  if (j.contains("problem")) {
    const json& p = j.at("problem");
    only_keys(p, "problem", {"kind", "N", "norm", "dim", "seed"});
    read(p, "problem", "kind", c.problem.kind);
    read(p, "problem", "N", c.problem.N);
    read(p, "problem", "norm", c.problem.norm);
    read(p, "problem", "dim", c.problem.dim);
    read(p, "problem", "seed", c.problem.seed);
  }
  read(j, "", "method", c.method);
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    only_keys(s, "schedule", {"kind", "b", "c", "d", "C0", "exponent"});
    read(s, "schedule", "kind", c.schedule.kind);
    read(s, "schedule", "b", c.schedule.b);
    read(s, "schedule", "c", c.schedule.c);
    read(s, "schedule", "d", c.schedule.d);
    read(s, "schedule", "C0", c.schedule.C0);
    read(s, "schedule", "exponent", c.schedule.exponent);
  }
  read(j, "", "C", c.C);
  read(j, "", "C1", c.C1);
  read(j, "", "gamma", c.gamma);
  read(j, "", "zeta", c.zeta);
  read(j, "", "theta", c.theta);
  read(j, "", "dp_tol", c.dp_tol);
  read(j, "", "delta_rel", c.delta_rel);
  read(j, "", "seeds", c.seeds);
  read(j, "", "step_init", c.step_init);
  read(j, "", "step_min", c.step_min);
  read(j, "", "step_max", c.step_max);
  read(j, "", "t_max", c.t_max);
  read(j, "", "n_max", c.n_max);
  read(j, "", "M1", c.M1);
  read(j, "", "alpha", c.alpha);
  if (j.contains("validation")) {
    const json& v = j.at("validation");
    only_keys(v, "validation",
              {"M1", "c0", "c1", "lambda", "y_norm", "residual0", "horizon", "alpha_tilde",
               "g0"});
    auto& o = c.validation;
    read(v, "validation", "M1", o.M1);
    read(v, "validation", "c0", o.c0);
    read(v, "validation", "c1", o.c1);
    read(v, "validation", "lambda", o.lambda);
    read(v, "validation", "y_norm", o.y_norm);
    read(v, "validation", "residual0", o.residual0);
    read(v, "validation", "horizon", o.horizon);
    read(v, "validation", "alpha_tilde", o.alpha_tilde);
    read(v, "validation", "g0", o.g0);
  }
  if (j.contains("inequality")) {
    const json& q = j.at("inequality");
    only_keys(q, "inequality",
              {"mode", "alpha", "beta", "gamma", "mu", "h", "p", "g0", "tau0", "T", "n_steps",
               "N"});
    auto& o = c.inequality;
    read(q, "inequality", "mode", o.mode);
    read_function(q, "inequality", "alpha", o.alpha);
    read_function(q, "inequality", "beta", o.beta);
    read_function(q, "inequality", "gamma", o.gamma);
    read_function(q, "inequality", "mu", o.mu);
    read_function(q, "inequality", "h", o.h);
    read(q, "inequality", "p", o.p);
    read(q, "inequality", "g0", o.g0);
    read(q, "inequality", "tau0", o.tau0);
    read(q, "inequality", "T", o.T);
    read(q, "inequality", "n_steps", o.n_steps);
    read(q, "inequality", "N", o.N);
  }
  read(j, "", "out_dir", c.out_dir);
  read(j, "", "format", c.format);
  read(j, "", "history", c.history);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
  json j;
  j["problem"] = {{"kind", c.problem.kind},
                  {"N", c.problem.N},
                  {"norm", c.problem.norm},
                  {"dim", c.problem.dim},
                  {"seed", c.problem.seed}};
  j["method"] = c.method;
  json s = {{"b", c.schedule.b},
            {"c", c.schedule.c},
            {"C0", c.schedule.C0},
            {"exponent", c.schedule.exponent}};
  s["kind"] = c.schedule.kind ? json(*c.schedule.kind) : json(nullptr);
  s["d"] = c.schedule.d ? json(*c.schedule.d) : json(nullptr);
  j["schedule"] = s;
  j["C"] = c.C;
  j["C1"] = c.C1;
  j["gamma"] = c.gamma;
  j["zeta"] = c.zeta;
  j["theta"] = c.theta;
  j["dp_tol"] = c.dp_tol;
  j["delta_rel"] = c.delta_rel;
  j["seeds"] = c.seeds;
  j["step_init"] = c.step_init;
  j["step_min"] = c.step_min;
  j["step_max"] = c.step_max;
  j["t_max"] = c.t_max ? json(*c.t_max) : json(nullptr);
  j["n_max"] = c.n_max ? json(*c.n_max) : json(nullptr);
  j["M1"] = c.M1 ? json(*c.M1) : json(nullptr);
  j["alpha"] = c.alpha ? json(*c.alpha) : json(nullptr);
  const auto& v = c.validation;
  j["validation"] = {{"M1", v.M1},         {"c0", v.c0},
                     {"c1", v.c1},         {"lambda", v.lambda},
                     {"y_norm", v.y_norm}, {"residual0", v.residual0},
                     {"horizon", v.horizon}, {"alpha_tilde", v.alpha_tilde},
                     {"g0", v.g0}};
  const auto& q = c.inequality;
  j["inequality"] = {{"mode", q.mode},
                     {"alpha", function_json(q.alpha)},
                     {"beta", function_json(q.beta)},
                     {"gamma", function_json(q.gamma)},
                     {"mu", function_json(q.mu)},
                     {"h", function_json(q.h)},
                     {"p", q.p},
                     {"g0", q.g0},
                     {"tau0", q.tau0},
                     {"T", q.T},
                     {"n_steps", q.n_steps},
                     {"N", q.N}};
  j["out_dir"] = c.out_dir;
  j["format"] = c.format;
  j["history"] = c.history;
  return j.dump(2);
}

}  // namespace dsm::app
