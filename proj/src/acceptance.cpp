#include "lde/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "lde/effective_coupling.hpp"
#include "lde/entanglement.hpp"
#include "lde/open_system.hpp"

namespace lde {

namespace {

using Clock = std::chrono::steady_clock;

struct Runner {
  std::vector<CriterionResult> results;
  std::ostream& log;

  template <typename F>
  void run(int id, const std::string& name, double budget_s, F&& body) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    const auto t0 = Clock::now();
    std::ostringstream detail;
    try {
      r.pass = body(detail);
    } catch (const std::exception& e) {
      r.pass = false;
      detail << " exception: " << e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (r.seconds > budget_s) {
      r.pass = false;
      detail << " [runtime " << r.seconds << " s exceeded budget " << budget_s << " s]";
    }
    r.detail = detail.str();
    log << (r.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << id << "  " << name << "  ("
        << std::fixed << std::setprecision(2) << r.seconds << " s)" << std::defaultfloat
        << r.detail << "\n";
    log.flush();
    results.push_back(std::move(r));
  }
};

ChainSpec make_spec(int L, double theta, double J_p) {
  ChainSpec s;
  s.L = L;
  s.theta = theta;
  s.J = 1.0;
  s.J_p = J_p;
  s.omega = 0.0;
  return s;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

TwoQubitXState random_x_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.05, 1.0);
  std::uniform_real_distribution<double> sgn(-1.0, 1.0);
  TwoQubitXState s;
  s.u = u01(rng);
  s.x = u01(rng);
  s.v = u01(rng);
  s.y = sgn(rng) * s.x;  // |y| <= x keeps the middle block positive
  s.z_q = s.u + 2.0 * s.x + s.v;
  return s;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& log) {
  Runner R{{}, log};

  // 1. Dimer oracle chain: Omega-sum coupling vs the analytic dimer value.
  R.run(1, "dimer oracle chain (L=2 grid vs closed form, rel 1e-10)", 1.0, [&](std::ostringstream& d) {
    double worst = 0.0;
    for (double theta : {-0.1, 0.0, 0.1})
      for (double T : {0.05, 0.1, 0.3}) {
        const ChainSpec spec = make_spec(2, theta, 0.1);
        const double want = j_eff_dimer_analytic(theta, T, 0.1).j_eff;
        worst = std::max(worst, rel_err(j_eff(spec, T, OmegaBackend::full_spectrum).j_eff, want));
        worst = std::max(worst, rel_err(j_eff(spec, T, OmegaBackend::resolvent).j_eff, want));
      }
    d << " worst rel = " << worst;
    return worst <= 1e-10;
  });

  // 2. T -> 0 limit equals 4 J_p^2 / (3 J).
  R.run(2, "zero-temperature limit (rel 1e-8)", 1.0, [&](std::ostringstream& d) {
    const ChainSpec spec = make_spec(2, 0.0, 0.1);
    const double got = j_eff(spec, 1e-4, OmegaBackend::full_spectrum).j_eff;
    const double want = 4.0 * 0.1 * 0.1 / 3.0;
    d << " got = " << got << ", want = " << want << ", rel = " << rel_err(got, want);
    return rel_err(got, want) <= 1e-8;
  });

  // 3. Full-system splitting oracle vs perturbative coupling at T -> 0.
  R.run(3, "full-system splitting oracle (L=2,4; 5%)", 120.0, [&](std::ostringstream& d) {
    bool ok = true;
    for (int L : {2, 4}) {
      const ChainSpec spec = make_spec(L, 0.0, 0.01);
      const double split = sw_numeric_oracle(spec);
      const CouplingContext ctx = coupling_context(spec, OmegaBackend::full_spectrum);
      const double pert = -2.0 * spec.J_p * spec.J_p * ctx.omega0;
      const double rel = rel_err(split, pert);
      d << " L=" << L << ": split=" << split << " pert=" << pert << " rel=" << rel << ";";
      ok = ok && rel <= 0.05;
    }
    return ok;
  });

  // 4. Scaling shape on L = 4..10 at T = 0.1 (resolvent backend).
  R.run(4, "scaling shape (strict growth, damped increments, fit < 5%)", 900.0,
        [&](std::ostringstream& d) {
    std::vector<std::pair<int, double>> pts;
    std::vector<double> first_term;
    for (int L : {4, 6, 8, 10}) {
      const ChainSpec spec = make_spec(L, 0.0, 0.1);
      const CouplingContext ctx = coupling_context(spec, OmegaBackend::resolvent);
      const EffectiveCoupling ec = ctx.at(0.1);
      pts.emplace_back(L, ec.j_eff);
      const double gap = ctx.eps1 - ctx.eps0;
      first_term.push_back(2.0 * 0.01 * std::abs(ctx.omega0) / (1.0 + 3.0 * std::exp(-gap / 0.1)));
    }
    bool increasing = true, damped = true;
    for (std::size_t i = 1; i < pts.size(); ++i)
      increasing = increasing && pts[i].second > pts[i - 1].second;
    for (std::size_t i = 2; i < pts.size(); ++i)
      damped = damped && (pts[i].second - pts[i - 1].second) <
                             (pts[i - 1].second - pts[i - 2].second);
    const SaturationFit fit = saturation_fit(pts);
    const bool fit_ok = fit.residual < 0.05 * std::abs(fit.j_inf);

    d << " j_eff(L) =";
    for (auto& [L, j] : pts) d << " " << j;
    d << "; increasing=" << increasing << " damped=" << damped
      << " fit{j_inf=" << fit.j_inf << ", xi=" << fit.decay_length
      << ", residual=" << fit.residual << "} fit_ok=" << fit_ok << ".";
    if (!(increasing && damped && fit_ok)) {
      d << " Analysis: with open boundaries the first excited triplet is the edge-state"
           " triplet whose gap collapses with L (0.509, 0.308, 0.202, 0.138 here), so at"
           " T = 0.1 the thermal factor exp(-gap/T) is no longer negligible at L >= 8 and"
           " the exact two-level coupling bends down toward its degenerate-quartet plateau."
           " The monotone-saturation shape holds for the dominant ground-level term"
           " 2 J_p^2 |Omega0| / (1 + 3 exp(-gap/T)) =";
      for (double v : first_term) d << " " << v;
      d << ", which is the quantity the figure tracks; the full expression is pinned"
           " instead by the dimer closed form (criterion 1), and the two requirements"
           " are incompatible on this grid.";
    }
    return increasing && damped && fit_ok;
  });

  // 5. Surface monotonicity at L = 6.
  R.run(5, "surface monotonicity (dJ/dT < 0, dJ/dtheta > 0)", 300.0, [&](std::ostringstream& d) {
    const CouplingContext ctx = coupling_context(make_spec(6, 0.0, 0.1), OmegaBackend::full_spectrum);
    bool t_ok = true;
    double prev = 0;
    for (int i = 0; i < 8; ++i) {
      const double T = 0.02 + (0.3 - 0.02) * i / 7.0;
      const double j = ctx.at(T).j_eff;
      if (i > 0) t_ok = t_ok && (j < prev);
      prev = j;
    }
    bool th_ok = true;
    double prev_th = 0;
    for (int i = 0; i < 5; ++i) {
      const double theta = -0.05 + 0.1 * i / 4.0;
      const double j = coupling_context(make_spec(6, theta, 0.1), OmegaBackend::full_spectrum)
                           .at(0.05).j_eff;
      if (i > 0) th_ok = th_ok && (j > prev_th);
      prev_th = j;
    }
    d << " dJ/dT<0: " << t_ok << ", dJ/dtheta>0: " << th_ok;
    return t_ok && th_ok;
  });

  // 6. Thermal-concurrence threshold at J/T = ln 3.
  R.run(6, "entanglement threshold at ln 3 (1e-9)", 1.0, [&](std::ostringstream& d) {
    const double T = 1.0;
    double lo = 0.5, hi = 2.5;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (concurrence_xstate(thermal_pair_state(mid, 0.0, T)) > 0.0 ? hi : lo) = mid;
    }
    const double zero = 0.5 * (lo + hi);
    d << " zero at J/T = " << std::setprecision(12) << zero << ", ln3 = " << std::log(3.0);
    return std::abs(zero - std::log(3.0)) <= 1e-9;
  });

  // 7. CPTP and channel identities.
  R.run(7, "channel identities (completeness, element formulas, semigroup)", 60.0,
        [&](std::ostringstream& d) {
    std::mt19937_64 rng(20240901ULL);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    double worst_complete = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double p = u01(rng);
      const double nb = 3.0 * u01(rng);
      const auto K = gad_kraus(p, nb);
      Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
      for (const auto& k : K) s += k.adjoint() * k;
      worst_complete = std::max(worst_complete,
                                (s - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff());
    }
    const bool a_ok = worst_complete <= 1e-14;

    double worst_elem = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double j = 0.005 + 0.08 * u01(rng);
      const double om = 0.02 * u01(rng);
      const double T = 0.005 + 0.05 * u01(rng);
      const double p = u01(rng);
      const double nb = 0.1 + 3.0 * u01(rng);
      const TwoQubitXState x0 = thermal_pair_state(j, om, T);
      const TwoQubitState evolved = kraus_apply(x0.state(), p, nb);
      const TwoQubitXState formula = xstate_elements(j, om, T, p, nb);
      const Eigen::Matrix4cd got = evolved.rho * x0.z_q;  // unnormalized, z_q fixed at t=0
      const double scale = std::abs(formula.z_q);
      worst_elem = std::max(worst_elem,
                            std::max({std::abs(got(0, 0).real() - formula.u),
                                      std::abs(got(1, 1).real() - formula.x),
                                      std::abs(got(1, 2).real() - formula.y),
                                      std::abs(got(3, 3).real() - formula.v)}) / scale);
    }
    const bool b_ok = worst_elem <= 1e-12;

    const NoiseParams noise{1.0, 0.1};
    const TwoQubitXState x0 = thermal_pair_state(0.05, 0.0, 0.01);
    std::vector<double> grid;
    for (int i = 0; i <= 25; ++i) grid.push_back(500.0 * i / 25.0);  // 50 / Gamma
    const Trajectory traj = integrate_master_equation(x0.state(), HEffMode::free_only, 0.0, 0.0,
                                                      noise, grid, 1e-10);
    double worst_semi = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const TwoQubitState kr = kraus_evolve(x0.state(), grid[i], noise);
      worst_semi = std::max(worst_semi, (kr.rho - traj.rho[i]).cwiseAbs().maxCoeff());
    }
    const bool c_ok = worst_semi <= 1e-6;

    d << " completeness worst = " << worst_complete << " (" << (a_ok ? "ok" : "FAIL")
      << "); element formulas worst rel = " << worst_elem << " (" << (b_ok ? "ok" : "FAIL")
      << "); kraus-vs-master-equation sup = " << worst_semi << " (" << (c_ok ? "ok" : "FAIL")
      << ").";
    if (!b_ok) {
      d << " Analysis: the printed closed-form u, v, x use one symmetric exchange"
           " probability a = n p/(2n+1) for both transfer directions, while the product"
           " damping channel moves population with a upward and b = (n+1) p/(2n+1)"
           " downward; only the coherence element y (factor 1-p) matches. The forms"
           " coincide solely in the n -> infinity or p -> 0 limits, so the 1e-12 identity"
           " cannot hold; the exact channel is used everywhere else.";
    }
    return a_ok && b_ok && c_ok;
  });

  // 8. Concurrence closed form vs the general construction.
  R.run(8, "concurrence equivalence on 1000 X states (1e-10)", 10.0, [&](std::ostringstream& d) {
    std::mt19937_64 rng(20240902ULL);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const TwoQubitXState s = random_x_state(rng);
      worst = std::max(worst, std::abs(concurrence_wootters(s.state()) - concurrence_xstate(s)));
    }
    d << " worst |general - closed| = " << worst;
    return worst <= 1e-10;
  });

  // 9. Teleportation fidelity: quadrature oracle, anchors, recorded deviation.
  R.run(9, "teleportation fidelity (quadrature, anchors, deviation)", 30.0,
        [&](std::ostringstream& d) {
    std::mt19937_64 rng(20240903ULL);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const FidelityReport rep = average_fidelity(random_x_state(rng));
      worst = std::max(worst, std::abs(rep.f_avg_formula - rep.f_avg_quadrature));
    }
    const bool rand_ok = worst <= 1e-8;

    TwoQubitXState singlet{0.0, 0.5, -0.5, 0.0, 1.0};
    const FidelityReport fs = average_fidelity(singlet);
    const bool singlet_ok = std::abs(fs.f_avg_formula - 1.0) <= 1e-12 &&
                            std::abs(fs.f_avg_quadrature - 1.0) <= 1e-12 &&
                            std::abs(fs.f_avg_alt - 1.0) <= 1e-12;

    TwoQubitXState mixed{0.25, 0.25, 0.0, 0.25, 1.0};
    const FidelityReport fm = average_fidelity(mixed);
    const bool mixed_ok = std::abs(fm.f_avg_formula - 0.5) <= 1e-12 &&
                          std::abs(fm.f_avg_quadrature - 0.5) <= 1e-12;
    const bool deviation_ok = std::abs(fm.f_avg_alt - 5.0 / 12.0) <= 1e-12;

    d << " random worst = " << worst << "; singlet F = " << fs.f_avg_formula
      << "; mixed F = " << fm.f_avg_quadrature << ", alt form on mixed = " << fm.f_avg_alt
      << " (deviation from 1/2 recorded: " << (deviation_ok ? "yes" : "no") << ")";
    return rand_ok && singlet_ok && mixed_ok && deviation_ok;
  });

  // 10. Fidelity decay crossing with the saturated chain coupling.
  R.run(10, "fidelity above 2/3 with positive crossing time", 60.0, [&](std::ostringstream& d) {
    const ChainSpec spec = make_spec(10, 0.0, 0.1);
    const double j = coupling_context(spec, OmegaBackend::resolvent).at(0.01).j_eff;
    const NoiseParams noise{1.0, 0.1};
    const TwoQubitState s0 = thermal_pair_state(j, 0.0, 0.01).state();
    const auto F = [&](double t) {
      const TwoQubitState st = kraus_evolve(s0, t, noise);
      TwoQubitXState x;
      x.u = st.rho(0, 0).real();
      x.x = 0.5 * (st.rho(1, 1).real() + st.rho(2, 2).real());
      x.y = st.rho(1, 2).real();
      x.v = st.rho(3, 3).real();
      x.z_q = x.u + 2 * x.x + x.v;
      return average_fidelity(x).f_avg_formula;
    };
    const double f0 = F(0.0);
    if (f0 <= 2.0 / 3.0) {
      d << " F(0) = " << f0 << " not above 2/3";
      return false;
    }
    double lo = 0.0, hi = 50.0;
    if (F(hi) >= 2.0 / 3.0) {
      d << " no crossing below t = 50";
      return false;
    }
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (F(mid) > 2.0 / 3.0 ? lo : hi) = mid;
    }
    const double t_star = 0.5 * (lo + hi);
    d << " j_eff(sat) = " << j << ", F(0) = " << f0 << ", t* = " << t_star;
    return t_star > 0.0;
  });

  // 11. Interacting-vs-free trajectory comparison is computed and reported.
  R.run(11, "interacting-vs-free comparison reported", 60.0, [&](std::ostringstream& d) {
    const ChainSpec spec = make_spec(10, 0.0, 0.1);
    const double j = coupling_context(spec, OmegaBackend::resolvent).at(0.01).j_eff;
    const NoiseParams noise{1.0, 0.1};
    const TwoQubitState s0 = thermal_pair_state(j, 0.0, 0.01).state();
    std::vector<double> grid;
    for (int i = 0; i <= 50; ++i) grid.push_back(20.0 * i / 50.0);
    const Trajectory free_traj =
        integrate_master_equation(s0, HEffMode::free_only, j, 0.0, noise, grid, 1e-10);
    const Trajectory int_traj =
        integrate_master_equation(s0, HEffMode::interacting, j, 0.0, noise, grid, 1e-10);
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      sup = std::max(sup, (free_traj.rho[i] - int_traj.rho[i]).cwiseAbs().maxCoeff());
    d << " sup-norm difference = " << sup
      << ". The pair Hamiltonian commutes with every X-form state, so the interacting and"
         " free master equations coincide on this family; the claimed slow-vs-fast"
         " distinction between the two cases does not arise, and the measured difference"
         " is integrator-level only.";
    return true;  // the criterion is the production of this report
  });

  return R.results;
}

int report_acceptance(const std::vector<CriterionResult>& results, std::ostream& os) {
  int failures = 0;
  os << "\n==== acceptance summary ====\n";
  for (const auto& r : results) {
    os << (r.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << r.id << "  " << r.name << "\n";
    if (!r.pass) ++failures;
  }
  os << failures << " of " << results.size() << " criteria failing\n";
  return failures;
}

}  // namespace lde
