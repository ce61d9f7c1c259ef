#pragma once

// Effective probe-probe Heisenberg coupling mediated by the chain: boundary
// resolvent sums, the finite-temperature coupling, the analytic dimer closed
// form, a brute-force full-system splitting oracle, and the finite-size
// saturation fit.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lde/chain_spectrum.hpp"
#include "lde/spectrum_cache.hpp"

namespace lde {

enum class OmegaBackend { full_spectrum, resolvent };

/// Boundary resolvent sum Omega^{l,z}_{1,L} for level l in {0, 1}.
///
/// l = 0: sum over all intermediates k of
///        <phi0|S1^z|k><k|SL^z|phi0> / (eps_k - eps_0).
/// l = 1: summed over the three triplet members; the ground-state
///        intermediate keeps the 1/(eps_0 - eps_1) denominator while
///        intermediates above the triplet enter with the reversed
///        denominator 1/(eps_1 - eps_k). This convention is what the
///        analytic dimer coupling encodes; see j_eff_dimer_analytic and the
///        L = 2 unit oracles.
struct OmegaSum {
  int level = 0;
  int i = 1, j = 1;          // boundary sites, 1-based
  double value = 0.0;        // units 1/energy
  double imag_residual = 0;  // |Im|/max(|value|,eps) of the complex-assembled sum
  int excluded_terms = 0;    // near-degenerate denominators dropped
};

struct ComputeOptions {
  DiagOptions diag;
  double cg_tol = 1e-10;     // relative residual of the projected solves
  int cg_max_iter = 20000;
  SpectrumCache* cache = nullptr;  // optional, full_spectrum backend only
};

OmegaSum omega_sum(const ChainSpec& spec, int level, OmegaBackend backend,
                   const ComputeOptions& opts = {});

/// General component sum with operators S_1^alpha and (S_L^beta)^dagger,
/// full-spectrum backend, for the isotropy and cross-term properties.
/// alpha = beta = z reproduces omega_sum's value.
double omega_sum_component(const ChainSpec& spec, int level, SpinComponent alpha,
                           SpinComponent beta, const ComputeOptions& opts = {});

struct EffectiveCoupling {
  double j_eff = 0;
  double T = 0;
  double theta = 0;
  int L = 0;
  double J_p = 0;
  double omega0 = 0, omega1 = 0;
  double eps0 = 0, eps1 = 0;
  bool out_of_validity = false;
};

/// J_eff = -(2 J_p^2 / Z) (Omega^0 + e^{-gap/T} Omega^1) with
/// Z = 1 + 3 e^{-gap/T} (ground-energy gauge).
EffectiveCoupling j_eff(const ChainSpec& spec, double T, OmegaBackend backend,
                        const ComputeOptions& opts = {});

/// Chain-independent context: build the spectra once, then sweep T cheaply.
struct CouplingContext {
  double omega0 = 0, omega1 = 0, eps0 = 0, eps1 = 0;
  double theta = 0, J_p = 0;
  int L = 0;
  EffectiveCoupling at(double T) const;
};
CouplingContext coupling_context(const ChainSpec& spec, OmegaBackend backend,
                                 const ComputeOptions& opts = {});

/// Closed-form L = 2 coupling built from the dimer spectrum
/// eps0 = -2J(cos t - 2 sin t), eps1 = -J(cos t - sin t), eps2 = J(cos t + sin t).
EffectiveCoupling j_eff_dimer_analytic(double theta, double T, double J_p, double J = 1.0);

/// Brute-force validation: diagonalize the complete probes+chain Hamiltonian
/// at omega = 0 and return the singlet-triplet splitting of the lowest four
/// levels, identified by total-Sz sector. Requires J_p/J <= 0.1 and L <= 6.
double sw_numeric_oracle(const ChainSpec& spec);

struct SaturationFit {
  double j_inf = 0, amplitude = 0, decay_length = 0;
  double residual = 0;  // root-mean-square misfit
  bool converged = false;
  int iterations = 0;
};

/// Least-squares fit of j(L) = j_inf - A exp(-L/xi); deterministic
/// initialization, Levenberg-Marquardt, iteration cap 500. Non-convergence
/// reports best-so-far parameters with converged = false.
SaturationFit saturation_fit(std::span<const std::pair<int, double>> points);

}  // namespace lde
