#include "lde/chain_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace lde {

bool ChainSpec::validate() const {
  if (L < 2 || L % 2 != 0)
    throw std::domain_error("ChainSpec: L must be even and >= 2");
  if (J <= 0.0) throw std::domain_error("ChainSpec: J must be positive");
  if (std::abs(theta) >= std::atan(1.0 / 3.0))
    throw std::domain_error("ChainSpec: |theta| must be below atan(1/3)");
  return std::abs(J_p) / J <= 0.3;
}

SparseOperator build_chain_hamiltonian(const ChainSpec& spec, int sz_total) {
  spec.validate();
  const BasisPtr basis = SectorBasis::chain(spec.L, sz_total);
  const double c = spec.J * std::cos(spec.theta);
  const double s = spec.J * std::sin(spec.theta);

  SparseOperator H{basis, basis, {}};
  for (int i = 0; i + 1 < spec.L; ++i) {
    const SparseOperator bl = two_site_coupling(basis, i, i + 1, CouplingForm::bilinear);
    for (const auto& t : bl.triplets)
      H.triplets.emplace_back(t.row(), t.col(), c * t.value());
    const SparseOperator bq = two_site_coupling(basis, i, i + 1, CouplingForm::biquadratic);
    for (const auto& t : bq.triplets)
      H.triplets.emplace_back(t.row(), t.col(), s * t.value());
  }
  return H;
}

namespace {

// Lanczos with full re-orthogonalization on a real symmetric sparse matrix.
// Small sector dimensions make the cost irrelevant; ghost eigenvalues are
// intolerable for gap extraction.
SectorSpectrum lanczos_lowest(const SparseOperator& Hop, int k, int max_iter, double tol) {
  const Eigen::SparseMatrix<double> H = Hop.real_matrix();
  const Eigen::Index n = H.rows();
  k = std::min<Eigen::Index>(k, n);
  if (max_iter <= 0) max_iter = static_cast<int>(std::min<Eigen::Index>(n, std::max(8 * k + 60, 200)));
  max_iter = static_cast<int>(std::min<Eigen::Index>(max_iter, n));

  double hnorm = 0.0;
  for (const auto& t : Hop.triplets) hnorm = std::max(hnorm, std::abs(t.value()));
  hnorm = std::max(hnorm, 1.0);

  std::mt19937_64 rng(0x5eed5eedULL);  // fixed seed: deterministic basis
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);
  v.normalize();

  std::vector<Eigen::VectorXd> basis_vecs;
  std::vector<double> alpha, beta;
  basis_vecs.push_back(v);

  Eigen::VectorXd w(n);
  for (int it = 0; it < max_iter; ++it) {
    w.noalias() = H * basis_vecs.back();
    const double a = basis_vecs.back().dot(w);
    alpha.push_back(a);
    w -= a * basis_vecs.back();
    if (basis_vecs.size() > 1) w -= beta.back() * basis_vecs[basis_vecs.size() - 2];
    // full re-orthogonalization, twice
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis_vecs) w -= q.dot(w) * q;
    const double b = w.norm();
    if (b < 1e-13 * hnorm) break;  // invariant subspace exhausted
    beta.push_back(b);
    basis_vecs.push_back(w / b);
  }

  const int m = static_cast<int>(alpha.size());
  Eigen::MatrixXd Tm = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    Tm(i, i) = alpha[i];
    if (i + 1 < m) Tm(i, i + 1) = Tm(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tm);

  const int kk = std::min<int>(k, m);
  SectorSpectrum out;
  out.sector = Hop.sector_in;
  out.solver = SolverMode::krylov_extremal;
  out.eigenvalues.resize(kk);
  out.eigenvectors.resize(n, kk);
  for (int j = 0; j < kk; ++j) {
    out.eigenvalues[j] = es.eigenvalues()[j];
    Eigen::VectorXd rv = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i) rv += es.eigenvectors()(i, j) * basis_vecs[i];
    rv.normalize();
    out.eigenvectors.col(j) = rv;
  }
  // converged? check residuals of the requested pairs
  double worst = 0.0;
  for (int j = 0; j < kk; ++j) {
    const Eigen::VectorXd r = H * out.eigenvectors.col(j) - out.eigenvalues[j] * out.eigenvectors.col(j);
    worst = std::max(worst, r.norm());
  }
  if (worst > tol * hnorm * 100.0) {
    std::ostringstream msg;
    msg << "lanczos: not converged, worst residual " << worst << " (||H||~" << hnorm << ")";
    throw std::runtime_error(msg.str());
  }
  return out;
}

}  // namespace

SectorSpectrum diagonalize_sector(const SparseOperator& H, SolverMode mode, const DiagOptions& opts) {
  if (H.sector_in->dim() != H.sector_out->dim())
    throw std::invalid_argument("diagonalize_sector: operator must be square");
  const Eigen::Index n = static_cast<Eigen::Index>(H.sector_in->dim());
  if (n == 0) {
    SectorSpectrum out;
    out.sector = H.sector_in;
    out.solver = mode;
    return out;
  }
  if (mode == SolverMode::krylov_extremal)
    return lanczos_lowest(H, opts.krylov_k, opts.krylov_max_iter, opts.krylov_tol);

  if (n > opts.dense_cap) {
    std::ostringstream msg;
    msg << "diagonalize_sector: dense path refused at dimension " << n
        << " (cap " << opts.dense_cap << "); use krylov_extremal";
    throw std::runtime_error(msg.str());
  }
  Eigen::MatrixXd Hd = Eigen::MatrixXd(H.real_matrix());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hd);
  SectorSpectrum out;
  out.sector = H.sector_in;
  out.solver = SolverMode::dense_full;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  return out;
}

LowSpectrum low_spectrum(const ChainSpec& spec, const DiagOptions& opts) {
  spec.validate();
  LowSpectrum low;

  const auto solve = [&](int sz, int want) {
    SparseOperator H = build_chain_hamiltonian(spec, sz);
    const Eigen::Index n = static_cast<Eigen::Index>(H.sector_in->dim());
    DiagOptions o = opts;
    o.krylov_k = want;
    const SolverMode mode = n <= std::min(opts.dense_cap, 2500) ? SolverMode::dense_full
                                                                : SolverMode::krylov_extremal;
    return diagonalize_sector(H, mode, o);
  };

  SectorSpectrum s0 = solve(0, 4);
  SectorSpectrum sp = solve(1, 2);
  SectorSpectrum sm = solve(-1, 2);

  low.eps0 = s0.eigenvalues[0];
  low.ground_state = s0.eigenvectors.col(0);
  low.basis_sz0 = s0.sector;
  low.basis_szp = sp.sector;
  low.basis_szm = sm.sector;

  const double e_t0 = s0.eigenvalues[1];
  const double e_tp = sp.eigenvalues[0];
  const double e_tm = sm.eigenvalues[0];
  const double spread = std::max({e_t0, e_tp, e_tm}) - std::min({e_t0, e_tp, e_tm});
  if (spread > 1e-6 * spec.J) {
    std::ostringstream msg;
    msg << "low_spectrum: triplet candidates disagree by " << spread
        << " (Sz=0: " << e_t0 << ", Sz=+1: " << e_tp << ", Sz=-1: " << e_tm << ")";
    throw std::runtime_error(msg.str());
  }
  low.eps1 = (e_t0 + e_tp + e_tm) / 3.0;
  low.gap = low.eps1 - low.eps0;
  if (low.gap <= 0.0) throw std::runtime_error("low_spectrum: non-positive gap");
  if (s0.eigenvalues.size() > 1 && s0.eigenvalues[1] - low.eps0 < 1e-8 * spec.J)
    throw std::runtime_error("low_spectrum: ground state not isolated in the Sz=0 block");

  low.triplet_states[0] = sm.eigenvectors.col(0);
  low.triplet_states[1] = s0.eigenvectors.col(1);
  low.triplet_states[2] = sp.eigenvectors.col(0);
  low.next_sz0_energy = s0.eigenvalues.size() > 2 ? s0.eigenvalues[2] : low.eps1;
  return low;
}

ThermalWeights thermal_weights(const LowSpectrum& low, double T) {
  if (T <= 0.0) throw std::domain_error("thermal_weights: T must be positive");
  ThermalWeights w;
  w.T = T;
  w.eps0 = low.eps0;
  w.eps1 = low.eps1;
  w.w0 = 1.0;
  w.w1 = std::exp(-low.gap / T);
  w.Z = w.w0 + 3.0 * w.w1;
  w.out_of_validity = T >= low.gap;
  return w;
}

}  // namespace lde
