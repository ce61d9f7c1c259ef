#pragma once

// Entanglement and teleportation figures of merit: Wootters concurrence
// (general and X-state closed form), the standard-teleportation output
// channel and the Bloch-sphere-averaged fidelity with a quadrature oracle.

#include <Eigen/Dense>

#include "lde/open_system.hpp"

namespace lde {

struct InputQubit {
  double theta_b = 0;  // polar Bloch angle in [0, pi]
  double phi_b = 0;    // azimuth in [0, 2 pi)

  /// cos(theta/2)|g> + sin(theta/2) e^{i phi} |e>
  Eigen::Vector2cd ket() const;
};

/// C = max{0, l1 - l2 - l3 - l4}, l_i the descending square roots of the
/// eigenvalues of rho (sy x sy) rho* (sy x sy). Throws on non-positive input.
double concurrence_wootters(const TwoQubitState& state);

/// X-state closed form C = (2/z_q) max{0, |y| - sqrt(u v)}.
double concurrence_xstate(const TwoQubitXState& state);

/// rho_out = sum_i Tr[E^i rho] sigma^i rho_in sigma^i with E^0 the singlet
/// projector and E^i its Pauli conjugates.
Eigen::Matrix2cd teleport_output(const TwoQubitState& channel, const InputQubit& input);

struct FidelityReport {
  double f_avg_formula = 0;     // 1/3 + 2(x - y)/(3 z_q)
  double f_avg_quadrature = 0;  // Bloch-sphere average of Tr[rho_out rho_in]
  double f_avg_alt = 0;         // alternative closed form 1/6 + (3x - 2y)/(3 z_q),
                                // kept for traceability (deviates on mixed channels)
  double singlet_fraction = 0;  // <psi-|rho|psi->
};

/// Average teleportation fidelity of an X-state channel. The quadrature
/// (64-point Gauss-Legendre in cos(theta) x 64-point uniform in phi, exact
/// for the degree-2 integrand) is the ground truth.
FidelityReport average_fidelity(const TwoQubitXState& channel);

}  // namespace lde
