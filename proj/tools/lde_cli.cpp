// Command-line front end: reproducible parameter sweeps and figure-ready CSV
// output for the chain-mediated entanglement pipeline.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lde/acceptance.hpp"
#include "lde/cli_runs.hpp"
#include "lde/run_config.hpp"
#include "lde/version.hpp"

namespace {

// exit codes: 0 success, 2 usage, 3 physics domain, 4 numerical failure
constexpr int kUsage = 2;
constexpr int kDomain = 3;
constexpr int kNumerical = 4;

void bind_common(CLI::App* cmd, lde::RunConfig& cfg) {
  cmd->add_option("--theta", cfg.theta, "biquadratic angle (rad)");
  cmd->add_option("--J", cfg.J, "chain coupling (energy unit)");
  cmd->add_option("--J-p", cfg.J_p, "probe coupling");
  cmd->add_option("--omega", cfg.omega, "probe level splitting");
  cmd->add_option("--backend", cfg.backend, "omega backend: full|resolvent");
  cmd->add_option("--output", cfg.output, "output CSV path (default stdout)");
  cmd->add_option("--cache-dir", cfg.cache_dir, "spectrum cache directory");
  cmd->add_option("--seed", cfg.seed, "seed for randomized checks");
  cmd->add_option("--threads", cfg.threads, "worker pool size (0 = auto)");
  cmd->add_flag("--timestamp", cfg.timestamp, "embed a timestamp header line");
}

int dispatch(const lde::RunConfig& cfg, void (*fn)(const lde::RunConfig&, std::ostream&)) {
  if (cfg.output.empty()) {
    fn(cfg, std::cout);
    return 0;
  }
  std::ofstream os(cfg.output, std::ios::trunc);
  if (!os) {
    std::cerr << "error: cannot open output file " << cfg.output << "\n";
    return kUsage;
  }
  fn(cfg, os);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("lde ") + lde::kVersion +
               " - long-distance entanglement through spin-1 chains"};
  app.require_subcommand(1);

  // --config preloads defaults; explicit flags override them.
  lde::RunConfig cfg;
  bool config_sets_T = false;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        cfg = lde::RunConfig::from_json_file(argv[i + 1]);
        std::ifstream raw(argv[i + 1]);
        std::stringstream ss;
        ss << raw.rdbuf();
        config_sets_T = nlohmann::json::parse(ss.str()).contains("T");
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
      }
    }
  }
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override it)");
  app.fallthrough();  // accept --config after the subcommand name too

  auto* scaling = app.add_subcommand("jeff-scaling", "effective coupling vs chain length");
  scaling->add_option("--L-list", cfg.L_list, "even chain lengths");
  scaling->add_option("--T", cfg.T, "temperature");
  bind_common(scaling, cfg);

  auto* surface = app.add_subcommand("jeff-surface", "effective coupling vs (T, theta)");
  surface->add_option("--L", cfg.L, "chain length");
  surface->add_option("--T-min", cfg.T_min);
  surface->add_option("--T-max", cfg.T_max);
  surface->add_option("--T-points", cfg.T_points);
  surface->add_option("--theta-min", cfg.theta_min);
  surface->add_option("--theta-max", cfg.theta_max);
  surface->add_option("--theta-points", cfg.theta_points);
  bind_common(surface, cfg);

  const auto bind_dynamics = [&](CLI::App* cmd) {
    cmd->add_option("--L", cfg.L, "chain length for the saturated coupling");
    cmd->add_option("--T", cfg.T, "preparation temperature");
    cmd->add_option("--n-bar", cfg.n_bar, "reservoir mean occupation");
    cmd->add_option("--gamma", cfg.gamma, "spontaneous emission rate");
    cmd->add_option("--t-max", cfg.t_max, "final time");
    cmd->add_option("--t-points", cfg.t_points, "time grid size");
    cmd->add_option("--ode-tol", cfg.ode_tol, "integrator tolerance");
    double jeff_val = 0.0;
    auto* opt = cmd->add_option("--j-eff", jeff_val, "use this coupling directly");
    cmd->callback([&cfg, opt, &jeff_val] {
      if (opt->count() > 0) cfg.j_eff_override = jeff_val;
    });
    bind_common(cmd, cfg);
  };

  auto* deco = app.add_subcommand("decoherence", "concurrence decay under local reservoirs");
  bind_dynamics(deco);
  auto* tele = app.add_subcommand("teleport", "average teleportation fidelity vs time");
  bind_dynamics(tele);

  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");

  // dynamics commands default to the low-temperature preparation point
  bool t_default = !config_sets_T;
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--T") t_default = false;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (scaling->parsed()) return dispatch(cfg, lde::run_jeff_scaling);
    if (surface->parsed()) return dispatch(cfg, lde::run_jeff_surface);
    if (deco->parsed() || tele->parsed()) {
      if (t_default) cfg.T = 0.01;
      return dispatch(cfg, deco->parsed() ? lde::run_decoherence : lde::run_teleport);
    }
    if (selftest->parsed()) {
      auto results = lde::run_acceptance(std::cout);
      const int failures = lde::report_acceptance(results, std::cout);
      return failures == 0 ? 0 : kNumerical;
    }
  } catch (const lde::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  }
  return 0;
}
