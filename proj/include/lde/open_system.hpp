#pragma once

// Two-qubit thermal state of the effective pair Hamiltonian and its evolution
// under independent local thermal reservoirs: the exact product-channel
// (Kraus) route and direct integration of the master equation.
//
// Basis order {|gg>, |ge>, |eg>, |ee>} with |g> the s^z = -1/2 state, so
// H_q|gg> = -omega |gg>.

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace lde {

struct TwoQubitState {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();

  /// Hermiticity/trace/positivity check; throws std::domain_error on failure.
  void validate(double tol = 1e-9) const;
};

/// X-form state: unnormalized elements u, x, y, v with normalization z_q
/// (diag = (u, x, x, v)/z_q, middle antidiagonal = y/z_q).
struct TwoQubitXState {
  double u = 0, x = 0, y = 0, v = 0;
  double z_q = 0;

  Eigen::Matrix4cd density() const;
  TwoQubitState state() const { return {density()}; }
};

struct NoiseParams {
  double n_bar = 1.0;   // mean reservoir occupation
  double gamma = 0.1;   // spontaneous-emission rate
};

/// Boltzmann state of H_eff = j_eff s_A.s_B + omega (s_A^z + s_B^z);
/// throws std::domain_error for T <= 0.
TwoQubitXState thermal_pair_state(double j_eff, double omega, double T);

/// Generalized amplitude damping Kraus set {K0, K1, K2, K3}.
std::array<Eigen::Matrix2cd, 4> gad_kraus(double p, double n_bar);

/// Exchange probability p(t) = 1 - exp(-2 Gamma (2 n_bar + 1) t); this is the
/// rate convention under which the product channel reproduces the master
/// equation semigroup (population relaxation 2 Gamma (2 n_bar + 1), coherence
/// factor sqrt(1-p)).
double p_of_t(double t, const NoiseParams& noise);

/// (GAD x GAD) product channel at a given exchange probability.
TwoQubitState kraus_apply(const TwoQubitState& state, double p, double n_bar);
/// Same channel at p = p_of_t(t).
TwoQubitState kraus_evolve(const TwoQubitState& state0, double t, const NoiseParams& noise);

/// Closed-form X-state elements of the evolved thermal state in the
/// symmetric-exchange approximation (one probability a = n_bar p/(2 n_bar+1)
/// for both transfer directions); y carries the exact factor (1 - p). Kept
/// for traceability; exact only in the n_bar -> infinity or p -> 0 limits —
/// see the channel tests. The z_q normalization is the t = 0 thermal one.
TwoQubitXState xstate_elements(double j_eff, double omega, double T, double p, double n_bar);

/// H_eff = j_eff s_A.s_B + omega (s_A^z + s_B^z) on the product basis.
Eigen::Matrix4cd pair_hamiltonian(double j_eff, double omega);

/// -i[H, rho] + sum_i (n+1) G (2 s- rho s+ - {s+ s-, rho}) + n G (2 s+ rho s- - {s- s+, rho})
Eigen::Matrix4cd lindblad_rhs(const Eigen::Matrix4cd& rho, const Eigen::Matrix4cd& h_eff,
                              const NoiseParams& noise);

enum class HEffMode { interacting, free_only };

struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::Matrix4cd> rho;
  std::vector<double> trace_drift;  // |tr - 1| before renormalization
};

/// Adaptive 4th/5th-order integration sampled on t_grid (ascending from 0).
/// Snapshots are renormalized in trace only when the drift exceeds 1e-12,
/// and the drift is recorded. Throws on step-size underflow.
Trajectory integrate_master_equation(const TwoQubitState& state0, HEffMode mode, double j_eff,
                                     double omega, const NoiseParams& noise,
                                     std::span<const double> t_grid, double tol = 1e-9);

}  // namespace lde
