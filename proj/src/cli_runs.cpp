#include "lde/cli_runs.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "lde/csv.hpp"
#include "lde/effective_coupling.hpp"
#include "lde/entanglement.hpp"
#include "lde/open_system.hpp"
#include "lde/version.hpp"

namespace lde {

namespace {

OmegaBackend backend_of(const RunConfig& cfg) {
  if (cfg.backend == "full") return OmegaBackend::full_spectrum;
  if (cfg.backend == "resolvent") return OmegaBackend::resolvent;
  throw UsageError("backend must be 'full' or 'resolvent'");
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw UsageError("grid needs at least one point");
  std::vector<double> v(static_cast<std::size_t>(n));
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

void emit_header(CsvWriter& csv, const char* command, const RunConfig& cfg) {
  csv.comment(std::string("lde ") + kVersion);
  csv.comment(std::string("command: ") + command);
  csv.comment("units: energies in J, times in 1/J, temperatures in J (hbar = k = 1)");
  csv.comment("config: " + cfg.to_json());
  if (cfg.timestamp) {
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    csv.comment(std::string("timestamp: ") + buf);
  }
}

ChainSpec spec_for(const RunConfig& cfg, int L, double theta) {
  ChainSpec s;
  s.L = L;
  s.theta = theta;
  s.J = cfg.J;
  s.J_p = cfg.J_p;
  s.omega = cfg.omega;
  if (!s.validate())
    std::cerr << "warning: J_p/J = " << s.J_p / s.J
              << " is outside the weak-coupling window (> 0.3); the perturbative"
                 " coupling may be unreliable\n";
  return s;
}

void pooled_for(int threads, std::size_t n, const std::function<void(std::size_t)>& task) {
  int hw = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  hw = std::min<std::size_t>(hw, n ? n : 1);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      task(i);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < hw; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

TwoQubitXState x_form(const Eigen::Matrix4cd& rho) {
  TwoQubitXState s;
  s.u = rho(0, 0).real();
  s.x = 0.5 * (rho(1, 1).real() + rho(2, 2).real());
  s.y = rho(1, 2).real();
  s.v = rho(3, 3).real();
  s.z_q = s.u + 2.0 * s.x + s.v;
  return s;
}

}  // namespace

double resolve_j_eff(const RunConfig& cfg, std::string* source) {
  if (cfg.j_eff_override) {
    if (source) *source = "override";
    return *cfg.j_eff_override;
  }
  const ChainSpec spec = spec_for(cfg, cfg.L, cfg.theta);
  const EffectiveCoupling ec = j_eff(spec, cfg.T, backend_of(cfg));
  if (source) {
    std::ostringstream ss;
    ss << "chain L=" << cfg.L << " backend=" << cfg.backend;
    *source = ss.str();
  }
  return ec.j_eff;
}

void run_jeff_scaling(const RunConfig& cfg, std::ostream& os) {
  if (cfg.L_list.empty()) throw UsageError("jeff-scaling: L list must not be empty");
  const OmegaBackend backend = backend_of(cfg);

  CsvWriter csv(os);
  emit_header(csv, "jeff-scaling", cfg);
  csv.header({"L", "j_eff", "omega0", "omega1", "gap", "backend", "error"});

  std::optional<SpectrumCache> cache;
  ComputeOptions opts;
  if (!cfg.cache_dir.empty()) {
    cache.emplace(cfg.cache_dir);
    opts.cache = &*cache;
  }

  std::vector<std::pair<int, double>> fit_points;
  for (int L : cfg.L_list) {
    try {
      const ChainSpec spec = spec_for(cfg, L, cfg.theta);
      const CouplingContext ctx = coupling_context(spec, backend, opts);
      const EffectiveCoupling ec = ctx.at(cfg.T);
      csv.row({CsvWriter::cell(L), CsvWriter::cell(ec.j_eff), CsvWriter::cell(ec.omega0),
               CsvWriter::cell(ec.omega1), CsvWriter::cell(ec.eps1 - ec.eps0), cfg.backend, ""});
      fit_points.emplace_back(L, ec.j_eff);
    } catch (const std::exception& e) {
      csv.row({CsvWriter::cell(L), "nan", "nan", "nan", "nan", cfg.backend, e.what()});
    }
  }

  if (fit_points.size() >= 3) {
    const SaturationFit fit = saturation_fit(fit_points);
    std::ostringstream ss;
    ss << "fit: {\"j_inf\":" << format_double(fit.j_inf) << ",\"amplitude\":"
       << format_double(fit.amplitude) << ",\"decay_length\":" << format_double(fit.decay_length)
       << ",\"residual\":" << format_double(fit.residual)
       << ",\"converged\":" << (fit.converged ? "true" : "false") << "}";
    csv.comment(ss.str());
  }
}

void run_jeff_surface(const RunConfig& cfg, std::ostream& os) {
  if (cfg.T_points < 1 || cfg.theta_points < 1)
    throw UsageError("jeff-surface: grids must be non-empty");
  const OmegaBackend backend = backend_of(cfg);
  const std::vector<double> Ts = linspace(cfg.T_min, cfg.T_max, cfg.T_points);
  const std::vector<double> thetas = linspace(cfg.theta_min, cfg.theta_max, cfg.theta_points);

  struct Cell {
    double j_eff = std::nan("");
    std::string validity = "domain_error";
  };
  std::vector<std::vector<Cell>> grid(thetas.size(), std::vector<Cell>(Ts.size()));

  pooled_for(cfg.threads, thetas.size(), [&](std::size_t ti) {
    try {
      const ChainSpec spec = spec_for(cfg, cfg.L, thetas[ti]);
      const CouplingContext ctx = coupling_context(spec, backend, {});
      for (std::size_t k = 0; k < Ts.size(); ++k) {
        const EffectiveCoupling ec = ctx.at(Ts[k]);
        grid[ti][k].j_eff = ec.j_eff;
        grid[ti][k].validity = ec.out_of_validity ? "out_of_validity" : "ok";
      }
    } catch (const std::exception&) {
      // rows stay flagged domain_error rather than being dropped
    }
  });

  CsvWriter csv(os);
  emit_header(csv, "jeff-surface", cfg);
  csv.header({"T", "theta", "j_eff", "validity"});
  for (std::size_t ti = 0; ti < thetas.size(); ++ti)
    for (std::size_t k = 0; k < Ts.size(); ++k)
      csv.row({CsvWriter::cell(Ts[k]), CsvWriter::cell(thetas[ti]),
               CsvWriter::cell(grid[ti][k].j_eff), grid[ti][k].validity});
}

void run_decoherence(const RunConfig& cfg, std::ostream& os) {
  if (cfg.t_points < 2) throw UsageError("decoherence: need at least 2 time points");
  std::string source;
  const double j = resolve_j_eff(cfg, &source);
  const NoiseParams noise{cfg.n_bar, cfg.gamma};
  const TwoQubitXState x0 = thermal_pair_state(j, cfg.omega, cfg.T);
  const TwoQubitState s0 = x0.state();
  const std::vector<double> ts = linspace(0.0, cfg.t_max, cfg.t_points);

  const Trajectory free_traj =
      integrate_master_equation(s0, HEffMode::free_only, j, cfg.omega, noise, ts, cfg.ode_tol);
  const Trajectory int_traj =
      integrate_master_equation(s0, HEffMode::interacting, j, cfg.omega, noise, ts, cfg.ode_tol);

  CsvWriter csv(os);
  emit_header(csv, "decoherence", cfg);
  csv.comment("j_eff = " + format_double(j) + " (" + source + ")");
  csv.header({"t", "C_free_kraus", "C_free_ode", "C_interacting_ode", "trace_drift"});

  double supdiff = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const TwoQubitState kr = kraus_evolve(s0, ts[i], noise);
    const double c_kraus = concurrence_wootters(kr);
    const double c_free = concurrence_wootters({free_traj.rho[i]});
    const double c_int = concurrence_wootters({int_traj.rho[i]});
    const double drift = std::max(free_traj.trace_drift[i], int_traj.trace_drift[i]);
    supdiff = std::max(supdiff,
                       (free_traj.rho[i] - int_traj.rho[i]).cwiseAbs().maxCoeff());
    csv.row({CsvWriter::cell(ts[i]), CsvWriter::cell(c_kraus), CsvWriter::cell(c_free),
             CsvWriter::cell(c_int), CsvWriter::cell(drift)});
  }
  csv.comment("interacting_vs_free_supnorm: " + format_double(supdiff));
}

void run_teleport(const RunConfig& cfg, std::ostream& os) {
  if (cfg.t_points < 2) throw UsageError("teleport: need at least 2 time points");
  std::string source;
  const double j = resolve_j_eff(cfg, &source);
  const NoiseParams noise{cfg.n_bar, cfg.gamma};
  const TwoQubitXState x0 = thermal_pair_state(j, cfg.omega, cfg.T);
  const TwoQubitState s0 = x0.state();
  const std::vector<double> ts = linspace(0.0, cfg.t_max, cfg.t_points);

  CsvWriter csv(os);
  emit_header(csv, "teleport", cfg);
  csv.comment("j_eff = " + format_double(j) + " (" + source + ")");
  csv.header({"t", "F_formula", "F_quadrature", "F_alt", "above_two_thirds"});

  const auto fidelity_at = [&](double t) {
    const TwoQubitState st = kraus_evolve(s0, t, noise);
    return average_fidelity(x_form(st.rho));
  };

  double t_prev = 0.0;
  bool was_above = false, have_cross = false;
  double t_star = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const FidelityReport rep = fidelity_at(ts[i]);
    const bool above = rep.f_avg_formula > 2.0 / 3.0;
    csv.row({CsvWriter::cell(ts[i]), CsvWriter::cell(rep.f_avg_formula),
             CsvWriter::cell(rep.f_avg_quadrature), CsvWriter::cell(rep.f_avg_alt),
             CsvWriter::cell(above)});
    if (i == 0) {
      was_above = above;
    } else if (was_above && !above && !have_cross) {
      // refine the first crossing by bisection
      double lo = t_prev, hi = ts[i];
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (fidelity_at(mid).f_avg_formula > 2.0 / 3.0 ? lo : hi) = mid;
      }
      t_star = 0.5 * (lo + hi);
      have_cross = true;
    }
    if (!have_cross) was_above = above;
    t_prev = ts[i];
  }
  csv.comment(have_cross ? "t_star_below_two_thirds: " + format_double(t_star)
                         : "t_star_below_two_thirds: none within grid");
}

}  // namespace lde
