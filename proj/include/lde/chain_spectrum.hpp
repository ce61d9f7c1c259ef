#pragma once

// Chain Hamiltonian assembly per total-Sz sector, dense and Krylov
// diagonalization, the low-lying singlet/triplet structure and the truncated
// thermal weights built on it.

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "lde/spin_core.hpp"

namespace lde {

struct ChainSpec {
  int L = 4;
  double theta = 0.0;  // radians
  double J = 1.0;      // energy unit
  double J_p = 0.1;    // probe coupling
  double omega = 0.0;  // probe level splitting

  /// Throws std::domain_error on invalid parameters. Returns true when the
  /// probe coupling is weak enough for the perturbative regime (J_p/J <= 0.3);
  /// a false return is the soft warning.
  bool validate() const;
};

enum class SolverMode { dense_full, krylov_extremal };

struct DiagOptions {
  int dense_cap = 12000;     // refuse dense above this dimension
  int krylov_k = 6;          // number of extremal pairs
  int krylov_max_iter = 0;   // 0 = automatic
  double krylov_tol = 1e-11; // residual tolerance relative to ||H||
};

struct SectorSpectrum {
  BasisPtr sector;
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // one column per stored pair; may be empty
  SolverMode solver = SolverMode::dense_full;
};

/// H_c block: J * sum_i [cos(theta) S_i.S_{i+1} + sin(theta) (S_i.S_{i+1})^2]
/// over the open chain, restricted to one total-Sz sector. Real symmetric.
SparseOperator build_chain_hamiltonian(const ChainSpec& spec, int sz_total);

SectorSpectrum diagonalize_sector(const SparseOperator& H, SolverMode mode,
                                  const DiagOptions& opts = {});

struct LowSpectrum {
  double eps0 = 0, eps1 = 0, gap = 0;
  Eigen::VectorXd ground_state;                 // Sz = 0 sector
  std::array<Eigen::VectorXd, 3> triplet_states; // Sz = -1, 0, +1
  BasisPtr basis_sz0, basis_szm, basis_szp;
  double next_sz0_energy = 0;  // second excited level in the Sz = 0 block
};

/// Ground singlet, first-excited triplet and the gap. Fails loudly when the
/// three triplet candidates disagree beyond 1e-6 J (signals a spec outside
/// the singlet-ground/triplet-first regime).
LowSpectrum low_spectrum(const ChainSpec& spec, const DiagOptions& opts = {});

struct ThermalWeights {
  double T = 0;
  double eps0 = 0, eps1 = 0;
  // Boltzmann factors in the eps0-shifted gauge: w0 = 1, w1 = exp(-gap/T).
  double w0 = 1, w1 = 0, Z = 1;
  bool out_of_validity = false;  // T >= gap
};

/// Truncated two-level weights; throws std::domain_error for T <= 0.
ThermalWeights thermal_weights(const LowSpectrum& low, double T);

}  // namespace lde
