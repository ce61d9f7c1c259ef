#pragma once

// Binary cache of sector spectra keyed by (L, theta, solver).
//
// File layout (little endian):
//   magic   8 bytes  "SPNSPEC1"
//   L       int32
//   theta   float64 (bit-exact key component)
//   count   int32   (number of sectors)
// then per sector:
//   sz_total    int32
//   dim         int64
//   n_eigs      int32
//   has_vectors uint8
//   eigenvalues n_eigs x float64
//   eigenvectors dim x n_eigs float64, column major (only if has_vectors)
//
// Lookups hit only on an exact key match.

#include <filesystem>
#include <optional>
#include <vector>

#include "lde/chain_spectrum.hpp"

namespace lde {

class SpectrumCache {
 public:
  explicit SpectrumCache(std::filesystem::path dir);

  /// Eigenvalue/eigenvector payload for one sector, detached from any basis.
  struct Entry {
    int sz_total = 0;
    std::int64_t dim = 0;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;  // empty when not stored
  };

  std::optional<std::vector<Entry>> load(int L, double theta, SolverMode mode) const;
  void store(int L, double theta, SolverMode mode, const std::vector<Entry>& entries) const;

  std::filesystem::path path_for(int L, double theta, SolverMode mode) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace lde
