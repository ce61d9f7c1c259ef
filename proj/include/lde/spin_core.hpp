#pragma once

// Spin operator algebra, tensor-product configuration spaces and total-Sz
// symmetry sectors for open chains of spin-1 sites, optionally capped by two
// spin-1/2 probe qubits at the ends.

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace lde {

using Complex = std::complex<double>;

enum class Spin { half, one };

/// Angular-momentum matrices in the |m>-descending basis (hbar = 1).
struct SpinOps {
  Eigen::MatrixXcd sx, sy, sz, s_plus, s_minus;
  int dim() const { return static_cast<int>(sz.rows()); }
};

SpinOps spin_matrices(Spin s);

/// One total-Sz block of the configuration space. Configurations are stored
/// as mixed-radix labels (site 0 most significant), digit 0 = largest local m,
/// enumerated in ascending label order. Probes, when present, occupy
/// positions 0 and L+1 so the chain stays contiguous.
class SectorBasis {
 public:
  /// Chain-only sector. Throws std::domain_error for odd or too-small L.
  /// An out-of-range sz_total yields an empty (dim 0) basis.
  static std::shared_ptr<const SectorBasis> chain(int L, int sz_total);
  /// Chain plus two spin-1/2 probes at positions 0 and L+1.
  static std::shared_ptr<const SectorBasis> chain_with_probes(int L, int sz_total);

  int chain_length() const { return L_; }
  bool has_probes() const { return probes_; }
  int site_count() const { return probes_ ? L_ + 2 : L_; }
  int sz_total() const { return sz_total_; }
  std::size_t dim() const { return labels_.size(); }

  std::uint64_t label(std::size_t idx) const { return labels_[idx]; }
  int local_dim(int site) const;
  double local_spin(int site) const;  // 0.5 or 1.0
  int digit(std::size_t idx, int site) const;
  /// Spin projection m at `site` of configuration `idx`.
  double m_value(std::size_t idx, int site) const;
  /// Index of a configuration label, if it belongs to this sector.
  std::optional<std::size_t> find(std::uint64_t label) const;

  /// Place weight of one digit in the mixed-radix label.
  std::uint64_t stride(int site) const { return strides_[site]; }

 private:
  SectorBasis(int L, int sz_total, bool probes);
  int L_ = 0;
  int sz_total_ = 0;
  bool probes_ = false;
  std::vector<std::uint64_t> labels_;   // ascending
  std::vector<std::uint64_t> strides_;  // per site
};

using BasisPtr = std::shared_ptr<const SectorBasis>;

/// Sector-restricted sparse operator in triplet form. Entries with magnitude
/// below 1e-14 are dropped at build time.
struct SparseOperator {
  BasisPtr sector_in;
  BasisPtr sector_out;
  std::vector<Eigen::Triplet<Complex>> triplets;

  Eigen::SparseMatrix<Complex> matrix() const;
  /// Real view; throws std::runtime_error if any entry has |Im| > 1e-14.
  Eigen::SparseMatrix<double> real_matrix() const;
};

enum class CouplingForm { bilinear, biquadratic, probe_heisenberg };

/// S_i . S_j, (S_i . S_j)^2 or probe-end Heisenberg exchange restricted to a
/// sector. All forms commute with total Sz, so the sector is invariant.
SparseOperator two_site_coupling(const BasisPtr& basis, int i, int j, CouplingForm form);

/// Single-site spin component < out | S^alpha_site | in >; for alpha = z the
/// two sectors must coincide, for +/- the out sector is shifted by +/-1.
enum class SpinComponent { z, plus, minus };
SparseOperator site_operator(const BasisPtr& basis_in, const BasisPtr& basis_out,
                             int site, SpinComponent alpha);

}  // namespace lde
