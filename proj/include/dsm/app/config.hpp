#pragma once

// Experiment configuration read from a JSON file. Every object rejects keys
// it does not know; ranges are checked in validate().

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsm/error.hpp"

namespace dsm::app {

/// Config failure, tagged with the offending key path ("flow.step_min") or,
/// for syntax errors, the line number.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message, int line = 0);
  [[nodiscard]] const std::string& key() const noexcept { return key_; }
  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

struct ProblemConfig {
  std::string kind = "hammerstein";  ///< hammerstein | rank_one | synthetic
  std::size_t N = 50;
  std::string norm = "nodal";  ///< nodal | l2 | euclidean (hammerstein only)
  std::size_t dim = 10;        ///< synthetic only
  std::uint64_t seed = 1;      ///< synthetic only
};

struct ScheduleConfig {
  std::optional<std::string> kind;  ///< defaults to the method's kind
  double b = 1.0;
  double c = 7.0;
  std::optional<double> d;  ///< searched with the validator when unset
  /// Newton iteration without d: a_n = C0 delta^exponent / (n + 1).
  double C0 = 4.0;
  double exponent = 0.99;
};

struct ValidationConfig {
  double M1 = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double lambda = 0.0;
  double y_norm = 1.0;
  double residual0 = 0.0;
  double horizon = 100.0;
  double alpha_tilde = 0.0;
  double g0 = 0.0;
};

/// A scalar function of t (or n): const: A; exp: A e^{k t}; power: A (c + t)^k.
struct FunctionSpec {
  std::string form = "const";
  double A = 0.0;
  double k = 0.0;
  double c = 1.0;
  [[nodiscard]] double operator()(double t) const;
  /// Exact derivative in t.
  [[nodiscard]] double derivative(double t) const;
};

struct InequalityConfig {
  std::string mode = "continuous";  ///< continuous | discrete
  FunctionSpec alpha, beta, gamma, mu;
  FunctionSpec h{"const", 1.0, 0.0, 1.0};  ///< discrete step
  double p = 2.0;
  double g0 = 0.0;
  double tau0 = 0.0;
  double T = 10.0;
  int n_steps = 10000;
  std::int64_t N = 100;
};

struct ExperimentConfig {
  ProblemConfig problem;
  /// dp | flow-newton | flow-gradient | flow-simple | iter-newton |
  /// iter-gradient | iter-simple
  std::string method = "iter-newton";
  ScheduleConfig schedule;

  double C = 1.01;
  double C1 = 1.5;
  double gamma = 0.99;
  double zeta = 0.9;
  double theta = 1.0;
  double dp_tol = 1e-6;

  std::vector<double> delta_rel{0.01};
  std::vector<std::uint64_t> seeds{1};

  double step_init = 0.1;
  double step_min = 1e-10;
  double step_max = 1.0;
  std::optional<double> t_max;
  std::optional<std::int64_t> n_max;
  std::optional<double> M1;
  std::optional<double> alpha;

  ValidationConfig validation;
  InequalityConfig inequality;

  std::string out_dir;        ///< empty: write to stdout
  std::string format = "csv";  ///< csv | json
  bool history = false;       ///< also emit residual histories / trajectories

  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Canonical JSON form (all keys present) for round-trip checks.
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace dsm::app
