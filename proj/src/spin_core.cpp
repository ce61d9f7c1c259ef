#include "lde/spin_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lde {

namespace {

constexpr double kPruneTol = 1e-14;

// S+ amplitude sqrt(s(s+1) - m(m+1)) for raising out of projection m.
double raise_amp(double s, double m) {
  const double a = s * (s + 1.0) - m * (m + 1.0);
  return a > kPruneTol ? std::sqrt(a) : 0.0;
}

}  // namespace

SpinOps spin_matrices(Spin which) {
  const double s = which == Spin::half ? 0.5 : 1.0;
  const int dim = which == Spin::half ? 2 : 3;
  SpinOps ops;
  ops.sz = Eigen::MatrixXcd::Zero(dim, dim);
  ops.s_plus = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const double m = s - k;  // descending
    ops.sz(k, k) = m;
    if (k > 0) ops.s_plus(k - 1, k) = raise_amp(s, m);
  }
  ops.s_minus = ops.s_plus.adjoint();
  ops.sx = 0.5 * (ops.s_plus + ops.s_minus);
  ops.sy = Complex(0, -0.5) * (ops.s_plus - ops.s_minus);
  return ops;
}

SectorBasis::SectorBasis(int L, int sz_total, bool probes)
    : L_(L), sz_total_(sz_total), probes_(probes) {
  const int n = site_count();
  strides_.assign(n, 1);
  for (int site = n - 2; site >= 0; --site)
    strides_[site] = strides_[site + 1] * local_dim(site + 1);
  const std::uint64_t total = strides_[0] * local_dim(0);

  // Enumerate in ascending label order; twice the projection stays integral.
  std::vector<int> digits(n, 0);
  const int target2 = 2 * sz_total;
  for (std::uint64_t lbl = 0; lbl < total; ++lbl) {
    std::uint64_t rest = lbl;
    int sz2 = 0;
    for (int site = 0; site < n; ++site) {
      const int d = static_cast<int>(rest / strides_[site]);
      rest %= strides_[site];
      sz2 += static_cast<int>(2.0 * (local_spin(site) - d));
    }
    if (sz2 == target2) labels_.push_back(lbl);
  }
}

std::shared_ptr<const SectorBasis> SectorBasis::chain(int L, int sz_total) {
  if (L < 2 || L % 2 != 0)
    throw std::domain_error("SectorBasis: chain length must be even and >= 2");
  // An out-of-range sz_total simply matches no configurations (dim 0).
  return std::shared_ptr<const SectorBasis>(new SectorBasis(L, sz_total, false));
}

std::shared_ptr<const SectorBasis> SectorBasis::chain_with_probes(int L, int sz_total) {
  if (L < 2 || L % 2 != 0)
    throw std::domain_error("SectorBasis: chain length must be even and >= 2");
  return std::shared_ptr<const SectorBasis>(new SectorBasis(L, sz_total, true));
}

int SectorBasis::local_dim(int site) const {
  return local_spin(site) == 0.5 ? 2 : 3;
}

double SectorBasis::local_spin(int site) const {
  if (probes_ && (site == 0 || site == L_ + 1)) return 0.5;
  return 1.0;
}

int SectorBasis::digit(std::size_t idx, int site) const {
  return static_cast<int>((labels_[idx] / strides_[site]) % local_dim(site));
}

double SectorBasis::m_value(std::size_t idx, int site) const {
  return local_spin(site) - digit(idx, site);
}

std::optional<std::size_t> SectorBasis::find(std::uint64_t label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

Eigen::SparseMatrix<Complex> SparseOperator::matrix() const {
  Eigen::SparseMatrix<Complex> m(static_cast<Eigen::Index>(sector_out->dim()),
                                 static_cast<Eigen::Index>(sector_in->dim()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

Eigen::SparseMatrix<double> SparseOperator::real_matrix() const {
  std::vector<Eigen::Triplet<double>> tr;
  tr.reserve(triplets.size());
  for (const auto& t : triplets) {
    if (std::abs(t.value().imag()) > 1e-14)
      throw std::runtime_error("SparseOperator: non-real entry in real view");
    tr.emplace_back(t.row(), t.col(), t.value().real());
  }
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(sector_out->dim()),
                                static_cast<Eigen::Index>(sector_in->dim()));
  m.setFromTriplets(tr.begin(), tr.end());
  return m;
}

namespace {

struct Accum {
  std::vector<Eigen::Triplet<Complex>> triplets;
  void add(std::size_t row, std::size_t col, double v) {
    if (std::abs(v) > kPruneTol)
      triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), Complex(v, 0));
  }
};

// Apply S^z_i S^z_j plus the ladder exchange to column `c`, accumulating rows.
void bilinear_column(const SectorBasis& b, std::size_t c, int i, int j, Accum& out) {
  const double si = b.local_spin(i), sj = b.local_spin(j);
  const double mi = b.m_value(c, i), mj = b.m_value(c, j);
  out.add(c, c, mi * mj);
  const std::uint64_t lbl = b.label(c);
  // 1/2 S+_i S-_j : digit i decreases (m up), digit j increases (m down)
  {
    const double a = raise_amp(si, mi) * raise_amp(sj, mj - 1.0);
    if (a != 0.0) {
      const std::uint64_t t = lbl - b.stride(i) + b.stride(j);
      if (auto r = b.find(t)) out.add(*r, c, 0.5 * a);
    }
  }
  // 1/2 S-_i S+_j
  {
    const double a = raise_amp(si, mi - 1.0) * raise_amp(sj, mj);
    if (a != 0.0) {
      const std::uint64_t t = lbl + b.stride(i) - b.stride(j);
      if (auto r = b.find(t)) out.add(*r, c, 0.5 * a);
    }
  }
}

}  // namespace

SparseOperator two_site_coupling(const BasisPtr& basis, int i, int j, CouplingForm form) {
  const int n = basis->site_count();
  if (i < 0 || i >= n || j < 0 || j >= n)
    throw std::out_of_range("two_site_coupling: site index out of range");
  if (i == j) throw std::invalid_argument("two_site_coupling: i == j");
  if (form == CouplingForm::probe_heisenberg) {
    if (!basis->has_probes())
      throw std::invalid_argument("two_site_coupling: probe form needs a probed basis");
    const bool pi = basis->local_dim(i) == 2, pj = basis->local_dim(j) == 2;
    if (pi == pj)
      throw std::invalid_argument("two_site_coupling: probe form couples one probe to one chain site");
  }

  Accum acc;
  for (std::size_t c = 0; c < basis->dim(); ++c) bilinear_column(*basis, c, i, j, acc);

  SparseOperator op{basis, basis, std::move(acc.triplets)};
  if (form != CouplingForm::biquadratic) return op;

  // (S_i . S_j)^2 as an explicit sparse product inside the sector.
  Eigen::SparseMatrix<double> m = op.real_matrix();
  Eigen::SparseMatrix<double> sq = (m * m).pruned(kPruneTol, 1.0);
  SparseOperator out{basis, basis, {}};
  out.triplets.reserve(static_cast<std::size_t>(sq.nonZeros()));
  for (int k = 0; k < sq.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sq, k); it; ++it)
      if (std::abs(it.value()) > kPruneTol)
        out.triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                  Complex(it.value(), 0));
  return out;
}

SparseOperator site_operator(const BasisPtr& basis_in, const BasisPtr& basis_out,
                             int site, SpinComponent alpha) {
  const int n = basis_in->site_count();
  if (site < 0 || site >= n) throw std::out_of_range("site_operator: site index out of range");
  const int dsz = alpha == SpinComponent::z ? 0 : (alpha == SpinComponent::plus ? 1 : -1);
  if (basis_out->sz_total() != basis_in->sz_total() + dsz)
    throw std::invalid_argument("site_operator: sector mismatch for component");

  SparseOperator op{basis_in, basis_out, {}};
  const double s = basis_in->local_spin(site);
  for (std::size_t c = 0; c < basis_in->dim(); ++c) {
    const double m = basis_in->m_value(c, site);
    if (alpha == SpinComponent::z) {
      if (std::abs(m) > kPruneTol)
        op.triplets.emplace_back(static_cast<int>(c), static_cast<int>(c), Complex(m, 0));
      continue;
    }
    const double a = alpha == SpinComponent::plus ? raise_amp(s, m) : raise_amp(s, m - 1.0);
    if (a == 0.0) continue;
    const std::uint64_t t = alpha == SpinComponent::plus
                                ? basis_in->label(c) - basis_in->stride(site)
                                : basis_in->label(c) + basis_in->stride(site);
    if (auto r = basis_out->find(t))
      op.triplets.emplace_back(static_cast<int>(*r), static_cast<int>(c), Complex(a, 0));
  }
  return op;
}

}  // namespace lde
