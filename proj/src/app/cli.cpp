#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "dsm/app/commands.hpp"
#include "dsm/app/emit.hpp"
#include "dsm/kernels.hpp"

namespace dsm::app {

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  std::string method;
  std::vector<double> delta_rel;
  bool history = false;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON experiment config");
  sub->add_option("--seed", f.seed, "single noise seed, replaces the config's seed list");
  sub->add_option("--out", f.out, "output directory (default: stdout)");
  sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--method", f.method, "solver method");
  sub->add_option("--delta-rel", f.delta_rel, "relative noise levels")->delimiter(',');
  sub->add_flag("--history", f.history, "also emit residual histories / trajectories");
}

// Flags override the corresponding config keys.
ExperimentConfig resolve(const Flags& f) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  if (f.seed) cfg.seeds = {*f.seed};
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (!f.format.empty()) cfg.format = f.format;
  if (!f.method.empty()) cfg.method = f.method;
  if (!f.delta_rel.empty()) cfg.delta_rel = f.delta_rel;
  if (f.history) cfg.history = true;
  cfg.validate();
  return cfg;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Regularized solvers for monotone operator equations with noisy data"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"dp", "discrepancy-principle choice of the regularization parameter"},
      {"flow", "continuous regularized flows stopped by the discrepancy rule"},
      {"iterate", "regularized iterations stopped by the discrepancy rule"},
      {"bench", "Hammerstein benchmark table"},
      {"schedule-check", "validate a regularization schedule"},
      {"ineq", "nonlinear differential inequality bound"},
  };
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);
  bool show_isa = false;
  app.add_flag("--isa", show_isa, "print the selected SIMD kernel set and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (show_isa) {
      std::cout << kernels::to_string(kernels::active().isa) << "\n";
      return kExitOk;
    }
    app.exit(e);
    return kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  ExperimentConfig cfg;
  try {
    cfg = resolve(flags);
  } catch (const Error& e) {
    std::cerr << "dsm: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }

  const CommandResult res = run_command(name, cfg);
  try {
    if (cfg.out_dir.empty()) {
      for (const auto& d : res.documents) std::cout << d.content;
    } else {
      std::error_code ec;
      std::filesystem::create_directories(cfg.out_dir, ec);
      if (ec) throw Error(ErrorKind::IoError, "cannot create '" + cfg.out_dir + "'");
      for (const auto& d : res.documents)
        write_file((std::filesystem::path(cfg.out_dir) / d.name).string(), d.content);
    }
  } catch (const Error& e) {
    std::cerr << "dsm: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  if (!res.message.empty()) std::cerr << "dsm: " << res.message << "\n";
  return res.exit_code;
}

}  // namespace dsm::app
