#include <doctest.h>

#include <map>

#include "lde/spin_core.hpp"

using namespace lde;

namespace {

// Independent sector-size oracle: dynamic-programming count of spin-1
// configurations with fixed total projection.
long dp_sector_dim(int L, int sz) {
  std::map<int, long> counts{{0, 1}};
  for (int site = 0; site < L; ++site) {
    std::map<int, long> next;
    for (const auto& [s, c] : counts)
      for (int m : {1, 0, -1}) next[s + m] += c;
    counts = std::move(next);
  }
  const auto it = counts.find(sz);
  return it == counts.end() ? 0 : it->second;
}

}  // namespace

TEST_CASE("spin matrices: defining representations") {
  const SpinOps one = spin_matrices(Spin::one);
  CHECK(one.sz(0, 0).real() == doctest::Approx(1.0));
  CHECK(one.sz(1, 1).real() == doctest::Approx(0.0));
  CHECK(one.sz(2, 2).real() == doctest::Approx(-1.0));

  // ladder: S+ |m=-1> = sqrt(2) |m=0>
  Eigen::Vector3cd down = Eigen::Vector3cd::Zero();
  down[2] = 1.0;
  const Eigen::Vector3cd raised = one.s_plus * down;
  CHECK(std::abs(raised[1] - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(raised[0]) < 1e-15);

  const SpinOps half = spin_matrices(Spin::half);
  const Eigen::MatrixXcd casimir =
      half.sx * half.sx + half.sy * half.sy + half.sz * half.sz;
  CHECK((casimir - 0.75 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("spin matrices: algebra") {
  for (const Spin s : {Spin::half, Spin::one}) {
    const SpinOps ops = spin_matrices(s);
    const std::complex<double> i1(0, 1);
    CHECK((ops.sx * ops.sy - ops.sy * ops.sx - i1 * ops.sz).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((ops.sy * ops.sz - ops.sz * ops.sy - i1 * ops.sx).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((ops.s_plus - ops.s_minus.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((ops.s_plus - (ops.sx + i1 * ops.sy)).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("sector basis: dimensions and determinism") {
  CHECK(SectorBasis::chain(2, 2)->dim() == 1);
  CHECK(SectorBasis::chain(2, 0)->dim() == 3);
  CHECK(SectorBasis::chain(10, 0)->dim() == 8953);
  CHECK(SectorBasis::chain(10, 0)->dim() == static_cast<std::size_t>(dp_sector_dim(10, 0)));
  for (int sz : {-3, -1, 0, 2, 4})
    CHECK(SectorBasis::chain(6, sz)->dim() == static_cast<std::size_t>(dp_sector_dim(6, sz)));

  CHECK_THROWS_AS(SectorBasis::chain(3, 0), std::domain_error);
  CHECK_THROWS_AS(SectorBasis::chain(0, 0), std::domain_error);
  CHECK(SectorBasis::chain(4, 5)->dim() == 0);
  CHECK(SectorBasis::chain(4, -7)->dim() == 0);

  // completeness: sum over sectors
  std::size_t total = 0;
  for (int sz = -4; sz <= 4; ++sz) total += SectorBasis::chain(4, sz)->dim();
  CHECK(total == 81);
  std::size_t total_p = 0;
  for (int sz = -3; sz <= 3; ++sz) total_p += SectorBasis::chain_with_probes(2, sz)->dim();
  CHECK(total_p == 4 * 9);

  // rebuilding yields identical label sequences
  const auto a = SectorBasis::chain(6, 1);
  const auto b = SectorBasis::chain(6, 1);
  REQUIRE(a->dim() == b->dim());
  for (std::size_t i = 0; i < a->dim(); ++i) CHECK(a->label(i) == b->label(i));
  for (std::size_t i = 1; i < a->dim(); ++i) CHECK(a->label(i) > a->label(i - 1));
}

TEST_CASE("sector basis: probe layout and projections") {
  const auto basis = SectorBasis::chain_with_probes(2, 1);
  CHECK(basis->site_count() == 4);
  CHECK(basis->local_dim(0) == 2);
  CHECK(basis->local_dim(1) == 3);
  CHECK(basis->local_dim(2) == 3);
  CHECK(basis->local_dim(3) == 2);
  for (std::size_t idx = 0; idx < basis->dim(); ++idx) {
    double sz = 0;
    for (int s = 0; s < 4; ++s) sz += basis->m_value(idx, s);
    CHECK(sz == doctest::Approx(1.0));
  }
}

TEST_CASE("two-site coupling: dimer multiplets") {
  // collect eigenvalues across every sector of the full two-site space
  std::map<int, int> degeneracy;  // rounded eigenvalue -> count
  std::map<int, int> degeneracy_sq;
  for (int sz = -2; sz <= 2; ++sz) {
    const auto basis = SectorBasis::chain(2, sz);
    if (basis->dim() == 0) continue;
    const Eigen::MatrixXd m =
        Eigen::MatrixXd(two_site_coupling(basis, 0, 1, CouplingForm::bilinear).real_matrix());
    const Eigen::MatrixXd m2 =
        Eigen::MatrixXd(two_site_coupling(basis, 0, 1, CouplingForm::biquadratic).real_matrix());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m), es2(m2);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      ++degeneracy[static_cast<int>(std::lround(es.eigenvalues()[i]))];
      CHECK(std::abs(es.eigenvalues()[i] - std::lround(es.eigenvalues()[i])) < 1e-12);
      ++degeneracy_sq[static_cast<int>(std::lround(es2.eigenvalues()[i]))];
    }
  }
  CHECK(degeneracy[-2] == 1);
  CHECK(degeneracy[-1] == 3);
  CHECK(degeneracy[1] == 5);
  CHECK(degeneracy_sq[4] == 1);
  CHECK(degeneracy_sq[1] == 8);
}

TEST_CASE("two-site coupling: hermiticity and Sz conservation") {
  const auto basis = SectorBasis::chain(4, 0);
  for (const CouplingForm f : {CouplingForm::bilinear, CouplingForm::biquadratic}) {
    const Eigen::SparseMatrix<Complex> m = two_site_coupling(basis, 1, 2, f).matrix();
    const Eigen::MatrixXcd d = Eigen::MatrixXcd(m);
    CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  }
  CHECK_THROWS_AS(two_site_coupling(basis, 0, 4, CouplingForm::bilinear), std::out_of_range);
  CHECK_THROWS_AS(two_site_coupling(basis, 2, 2, CouplingForm::bilinear), std::invalid_argument);
}

TEST_CASE("two-site coupling: sector blocks match the dense product-space operator") {
  // assemble S1.S2 on the full 9-dimensional two-site space from the dense
  // spin matrices and compare block-by-block with the sector construction
  const SpinOps one = spin_matrices(Spin::one);
  const auto kron = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  const Eigen::MatrixXcd full = kron(one.sx, one.sx) + kron(one.sy, one.sy) + kron(one.sz, one.sz);

  // the full operator commutes with Sz_total
  const Eigen::MatrixXcd id3 = Eigen::MatrixXcd::Identity(3, 3);
  const Eigen::MatrixXcd sz_tot = kron(one.sz, id3) + kron(id3, one.sz);
  CHECK((full * sz_tot - sz_tot * full).cwiseAbs().maxCoeff() < 1e-14);

  for (int sz = -2; sz <= 2; ++sz) {
    const auto basis = SectorBasis::chain(2, sz);
    const Eigen::MatrixXcd block =
        Eigen::MatrixXcd(two_site_coupling(basis, 0, 1, CouplingForm::bilinear).matrix());
    for (std::size_t r = 0; r < basis->dim(); ++r)
      for (std::size_t c = 0; c < basis->dim(); ++c) {
        const auto fr = static_cast<Eigen::Index>(basis->label(r));
        const auto fc = static_cast<Eigen::Index>(basis->label(c));
        CHECK(std::abs(block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) -
                       full(fr, fc)) < 1e-14);
      }
  }
}

TEST_CASE("sector states are Sz_total eigenstates") {
  for (int sz : {-2, 0, 3}) {
    const auto basis = SectorBasis::chain(4, sz);
    for (std::size_t idx = 0; idx < basis->dim(); ++idx) {
      double total = 0;
      for (int s = 0; s < 4; ++s) total += basis->m_value(idx, s);
      CHECK(total == doctest::Approx(static_cast<double>(sz)));
    }
  }
}

TEST_CASE("site operator: ladder between sectors") {
  const auto b0 = SectorBasis::chain(4, 0);
  const auto b1 = SectorBasis::chain(4, 1);
  const SparseOperator sp = site_operator(b0, b1, 0, SpinComponent::plus);
  const SparseOperator sm = site_operator(b1, b0, 0, SpinComponent::minus);
  // S- is the adjoint of S+ across the sector pair
  const Eigen::MatrixXcd a = Eigen::MatrixXcd(sp.matrix());
  const Eigen::MatrixXcd b = Eigen::MatrixXcd(sm.matrix());
  CHECK((a - b.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(site_operator(b0, b0, 0, SpinComponent::plus), std::invalid_argument);
}

TEST_CASE("probe coupling: mixed spin-1/2 x spin-1 multiplets") {
  // s.S on a spin-1/2 + spin-1 pair: 1/2 on the quartet, -1 on the doublet
  const auto basis = SectorBasis::chain_with_probes(2, 0);
  std::map<int, int> counts;
  for (int sz = -3; sz <= 3; ++sz) {
    const auto b = SectorBasis::chain_with_probes(2, sz);
    if (b->dim() == 0) continue;
    // couple probe A (site 0) to chain site 1 only; site 2 and probe B idle
    const Eigen::MatrixXd m =
        Eigen::MatrixXd(two_site_coupling(b, 0, 1, CouplingForm::probe_heisenberg).real_matrix());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const double v = es.eigenvalues()[i];
      const int key = static_cast<int>(std::lround(2.0 * v));
      CHECK(std::abs(2.0 * v - key) < 1e-12);
      ++counts[key];
    }
  }
  // idle factor spaces multiply degeneracies by 3 (site 2) x 2 (probe B)
  CHECK(counts[1] == 4 * 6);
  CHECK(counts[-2] == 2 * 6);

  const auto chain_only = SectorBasis::chain(2, 0);
  CHECK_THROWS_AS(two_site_coupling(chain_only, 0, 1, CouplingForm::probe_heisenberg),
                  std::invalid_argument);
}
