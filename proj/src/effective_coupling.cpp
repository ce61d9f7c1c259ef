#include "lde/effective_coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lde {

namespace {

Eigen::VectorXd sz_diagonal(const SectorBasis& basis, int site) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t i = 0; i < basis.dim(); ++i)
    d[static_cast<Eigen::Index>(i)] = basis.m_value(i, site);
  return d;
}

struct FullSpectra {
  SectorSpectrum szm, sz0, szp;  // Sz = -1, 0, +1
  const SectorSpectrum& at(int sz) const {
    return sz == 0 ? sz0 : (sz > 0 ? szp : szm);
  }
};

FullSpectra full_spectra(const ChainSpec& spec, const ComputeOptions& opts) {
  if (opts.cache) {
    if (auto hit = opts.cache->load(spec.L, spec.theta, SolverMode::dense_full)) {
      FullSpectra fs;
      bool ok = hit->size() == 3;
      for (const auto& e : *hit) {
        if (std::abs(e.sz_total) > 1 || e.eigenvectors.size() == 0) { ok = false; break; }
        BasisPtr b = SectorBasis::chain(spec.L, e.sz_total);
        if (static_cast<std::int64_t>(b->dim()) != e.dim) { ok = false; break; }
        SectorSpectrum s;
        s.sector = b;
        s.eigenvalues = e.eigenvalues;
        s.eigenvectors = e.eigenvectors;
        s.solver = SolverMode::dense_full;
        (e.sz_total == 0 ? fs.sz0 : (e.sz_total > 0 ? fs.szp : fs.szm)) = std::move(s);
      }
      if (ok) return fs;
    }
  }
  FullSpectra fs;
  for (int sz : {-1, 0, 1}) {
    SparseOperator H = build_chain_hamiltonian(spec, sz);
    SectorSpectrum s = diagonalize_sector(H, SolverMode::dense_full, opts.diag);
    (sz == 0 ? fs.sz0 : (sz > 0 ? fs.szp : fs.szm)) = std::move(s);
  }
  if (opts.cache) {
    std::vector<SpectrumCache::Entry> entries;
    for (int sz : {-1, 0, 1}) {
      const SectorSpectrum& s = fs.at(sz);
      entries.push_back({sz, static_cast<std::int64_t>(s.sector->dim()), s.eigenvalues,
                         s.eigenvectors});
    }
    opts.cache->store(spec.L, spec.theta, SolverMode::dense_full, entries);
  }
  return fs;
}

// One level-l member against all intermediates of its own sector, z channel.
// For l = 1, intermediates above the triplet enter with reversed denominators.
double member_sum_z(const SectorSpectrum& s, int li, double e_l, int level,
                    const Eigen::VectorXd& d1, const Eigen::VectorXd& dL, double J,
                    int* excluded) {
  const Eigen::VectorXd phi = s.eigenvectors.col(li);
  const Eigen::VectorXd a = s.eigenvectors.transpose() * d1.cwiseProduct(phi).matrix();
  const Eigen::VectorXd b = s.eigenvectors.transpose() * dL.cwiseProduct(phi).matrix();
  double sum = 0.0;
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    if (k == li) continue;
    const double de = s.eigenvalues[k] - e_l;
    if (std::abs(de) < 1e-10 * J) {
      ++*excluded;  // residual multiplet degeneracy
      continue;
    }
    const double num = a[k] * b[k];
    if (level == 1 && de > 0)
      sum -= num / de;
    else
      sum += num / de;
  }
  return sum;
}

struct OmegaPair {
  OmegaSum om0, om1;
  double eps0 = 0, eps1 = 0;
};

OmegaPair omega_full(const ChainSpec& spec, const ComputeOptions& opts) {
  const FullSpectra fs = full_spectra(spec, opts);
  const double eps0 = fs.sz0.eigenvalues[0];
  const double eps1 = (fs.sz0.eigenvalues[1] + fs.szp.eigenvalues[0] + fs.szm.eigenvalues[0]) / 3.0;

  OmegaPair out;
  out.eps0 = eps0;
  out.eps1 = eps1;
  out.om0 = {0, 1, spec.L, 0.0, 0.0, 0};
  out.om1 = {1, 1, spec.L, 0.0, 0.0, 0};

  const Eigen::VectorXd d1_0 = sz_diagonal(*fs.sz0.sector, 0);
  const Eigen::VectorXd dL_0 = sz_diagonal(*fs.sz0.sector, spec.L - 1);
  out.om0.value = member_sum_z(fs.sz0, 0, eps0, 0, d1_0, dL_0, spec.J, &out.om0.excluded_terms);

  out.om1.value = member_sum_z(fs.sz0, 1, eps1, 1, d1_0, dL_0, spec.J, &out.om1.excluded_terms);
  for (int sz : {-1, 1}) {
    const SectorSpectrum& s = fs.at(sz);
    const Eigen::VectorXd d1 = sz_diagonal(*s.sector, 0);
    const Eigen::VectorXd dL = sz_diagonal(*s.sector, spec.L - 1);
    out.om1.value += member_sum_z(s, 0, eps1, 1, d1, dL, spec.J, &out.om1.excluded_terms);
  }
  return out;
}

// Conjugate gradients for Q (H - shift) Q x = Q b, Q projecting off `excl`.
// The projected operator is positive definite by construction of `excl`.
Eigen::VectorXd projected_cg(const Eigen::SparseMatrix<double>& H, double shift,
                             const std::vector<Eigen::VectorXd>& excl,
                             const Eigen::VectorXd& rhs, double tol, int max_iter) {
  const auto project = [&](Eigen::VectorXd& v) {
    for (const auto& q : excl) v -= q.dot(v) * q;
  };
  Eigen::VectorXd b = rhs;
  project(b);
  const double bnorm = b.norm();
  // a right-hand side living entirely in the excluded subspace solves to zero
  if (bnorm <= 1e-13 * std::max(rhs.norm(), 1.0))
    return Eigen::VectorXd::Zero(rhs.size());

  Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
  Eigen::VectorXd r = b;
  Eigen::VectorXd p = r;
  Eigen::VectorXd Ap(rhs.size());
  double rs = r.squaredNorm();
  for (int it = 0; it < max_iter; ++it) {
    Ap.noalias() = H * p;
    Ap -= shift * p;
    project(Ap);
    const double alpha = rs / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    const double rs_new = r.squaredNorm();
    if (std::sqrt(rs_new) <= tol * bnorm) {
      project(x);
      return x;
    }
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  std::ostringstream msg;
  msg << "projected_cg: no convergence after " << max_iter
      << " iterations, residual " << r.norm() / bnorm;
  throw std::runtime_error(msg.str());
}

OmegaPair omega_resolvent(const ChainSpec& spec, const ComputeOptions& opts) {
  const LowSpectrum low = low_spectrum(spec, opts.diag);
  OmegaPair out;
  out.eps0 = low.eps0;
  out.eps1 = low.eps1;
  out.om0 = {0, 1, spec.L, 0.0, 0.0, 0};
  out.om1 = {1, 1, spec.L, 0.0, 0.0, 0};

  const Eigen::SparseMatrix<double> H0 =
      build_chain_hamiltonian(spec, 0).real_matrix();
  const Eigen::VectorXd d1_0 = sz_diagonal(*low.basis_sz0, 0);
  const Eigen::VectorXd dL_0 = sz_diagonal(*low.basis_sz0, spec.L - 1);

  // Level 0: plain resolvent off the ground state.
  {
    const Eigen::VectorXd b = dL_0.cwiseProduct(low.ground_state);
    const Eigen::VectorXd x =
        projected_cg(H0, low.eps0, {low.ground_state, low.triplet_states[1]}, b,
                     opts.cg_tol, opts.cg_max_iter);
    // the triplet member was projected out of the solve; restore its term
    const Eigen::VectorXd a = d1_0.cwiseProduct(low.ground_state);
    out.om0.value = a.dot(x) + (low.triplet_states[1].dot(a)) *
                                   (low.triplet_states[1].dot(b)) / low.gap;
  }

  // Level 1: explicit ground term plus reversed-denominator solves above.
  {
    const Eigen::VectorXd a = d1_0.cwiseProduct(low.triplet_states[1]);
    const Eigen::VectorXd b = dL_0.cwiseProduct(low.triplet_states[1]);
    out.om1.value = -(low.ground_state.dot(a)) * (low.ground_state.dot(b)) / low.gap;
    const Eigen::VectorXd x =
        projected_cg(H0, low.eps1, {low.ground_state, low.triplet_states[1]}, b,
                     opts.cg_tol, opts.cg_max_iter);
    out.om1.value -= a.dot(x);
  }
  for (int sz : {-1, 1}) {
    const BasisPtr basis = sz < 0 ? low.basis_szm : low.basis_szp;
    const Eigen::VectorXd& t = low.triplet_states[sz < 0 ? 0 : 2];
    const Eigen::SparseMatrix<double> H =
        build_chain_hamiltonian(spec, sz).real_matrix();
    const Eigen::VectorXd d1 = sz_diagonal(*basis, 0);
    const Eigen::VectorXd dL = sz_diagonal(*basis, spec.L - 1);
    const Eigen::VectorXd a = d1.cwiseProduct(t);
    const Eigen::VectorXd b = dL.cwiseProduct(t);
    const Eigen::VectorXd x = projected_cg(H, low.eps1, {t}, b, opts.cg_tol, opts.cg_max_iter);
    out.om1.value -= a.dot(x);
  }
  return out;
}

OmegaPair omega_pair(const ChainSpec& spec, OmegaBackend backend, const ComputeOptions& opts) {
  spec.validate();
  return backend == OmegaBackend::full_spectrum ? omega_full(spec, opts)
                                                : omega_resolvent(spec, opts);
}

}  // namespace

OmegaSum omega_sum(const ChainSpec& spec, int level, OmegaBackend backend,
                   const ComputeOptions& opts) {
  if (level != 0 && level != 1) throw std::domain_error("omega_sum: level must be 0 or 1");
  const OmegaPair pair = omega_pair(spec, backend, opts);
  return level == 0 ? pair.om0 : pair.om1;
}

double omega_sum_component(const ChainSpec& spec, int level, SpinComponent alpha,
                           SpinComponent beta, const ComputeOptions& opts) {
  spec.validate();
  if (level != 0 && level != 1)
    throw std::domain_error("omega_sum_component: level must be 0 or 1");
  const auto shift = [](SpinComponent c) {
    return c == SpinComponent::z ? 0 : (c == SpinComponent::plus ? 1 : -1);
  };
  if (shift(alpha) != shift(beta)) return 0.0;  // total-Sz selection rule

  // Spectra of every sector touched: member sectors and their images.
  std::vector<int> sectors = {-1, 0, 1};
  const int d = shift(alpha);
  for (int sz : {-1, 0, 1})
    if (std::abs(sz + d) <= spec.L &&
        std::find(sectors.begin(), sectors.end(), sz + d) == sectors.end())
      sectors.push_back(sz + d);
  std::vector<std::pair<int, SectorSpectrum>> specs;
  for (int sz : sectors) {
    SparseOperator H = build_chain_hamiltonian(spec, sz);
    specs.emplace_back(sz, diagonalize_sector(H, SolverMode::dense_full, opts.diag));
  }
  const auto spectrum = [&](int sz) -> const SectorSpectrum& {
    for (auto& [s, sp] : specs)
      if (s == sz) return sp;
    throw std::logic_error("omega_sum_component: missing sector");
  };

  const double eps0 = spectrum(0).eigenvalues[0];
  const double eps1 = (spectrum(0).eigenvalues[1] + spectrum(1).eigenvalues[0] +
                       spectrum(-1).eigenvalues[0]) / 3.0;
  const double e_l = level == 0 ? eps0 : eps1;

  std::vector<std::pair<int, int>> members;  // (sector, index)
  if (level == 0)
    members = {{0, 0}};
  else
    members = {{0, 1}, {1, 0}, {-1, 0}};

  double sum = 0.0;
  for (const auto& [sz, li] : members) {
    const SectorSpectrum& s = spectrum(sz);
    const int sz_img = sz + d;
    if (std::abs(sz_img) > spec.L) continue;
    const SectorSpectrum& img = spectrum(sz_img);
    const Eigen::VectorXd phi = s.eigenvectors.col(li);

    const auto apply = [&](int site, SpinComponent c) {
      const SparseOperator op = site_operator(s.sector, img.sector, site, c);
      Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(img.sector->dim()));
      for (const auto& t : op.triplets) v[t.row()] += t.value().real() * phi[t.col()];
      return v;
    };
    const Eigen::VectorXd a = img.eigenvectors.transpose() * apply(0, alpha);
    const Eigen::VectorXd bv = img.eigenvectors.transpose() * apply(spec.L - 1, beta);

    for (Eigen::Index k = 0; k < img.eigenvalues.size(); ++k) {
      // skip the source level itself (own multiplet)
      const double ek = img.eigenvalues[k];
      const double de = ek - e_l;
      if (std::abs(de) < 1e-10 * spec.J) continue;
      const double num = a[k] * bv[k];
      if (level == 1 && de > 0)
        sum -= num / de;
      else
        sum += num / de;
    }
  }
  return sum;
}

namespace {

EffectiveCoupling assemble(const ChainSpec& spec, double T, const OmegaPair& pair) {
  if (T <= 0.0) throw std::domain_error("j_eff: T must be positive");
  const double gap = pair.eps1 - pair.eps0;
  const double boltz = std::exp(-gap / T);
  const double z = 1.0 + 3.0 * boltz;
  EffectiveCoupling out;
  out.j_eff = -(2.0 * spec.J_p * spec.J_p / z) * (pair.om0.value + boltz * pair.om1.value);
  out.T = T;
  out.theta = spec.theta;
  out.L = spec.L;
  out.J_p = spec.J_p;
  out.omega0 = pair.om0.value;
  out.omega1 = pair.om1.value;
  out.eps0 = pair.eps0;
  out.eps1 = pair.eps1;
  out.out_of_validity = T >= gap;
  return out;
}

}  // namespace

EffectiveCoupling j_eff(const ChainSpec& spec, double T, OmegaBackend backend,
                        const ComputeOptions& opts) {
  return assemble(spec, T, omega_pair(spec, backend, opts));
}

CouplingContext coupling_context(const ChainSpec& spec, OmegaBackend backend,
                                 const ComputeOptions& opts) {
  const OmegaPair pair = omega_pair(spec, backend, opts);
  CouplingContext ctx;
  ctx.omega0 = pair.om0.value;
  ctx.omega1 = pair.om1.value;
  ctx.eps0 = pair.eps0;
  ctx.eps1 = pair.eps1;
  ctx.theta = spec.theta;
  ctx.J_p = spec.J_p;
  ctx.L = spec.L;
  return ctx;
}

EffectiveCoupling CouplingContext::at(double T) const {
  if (T <= 0.0) throw std::domain_error("CouplingContext: T must be positive");
  const double gap = eps1 - eps0;
  const double boltz = std::exp(-gap / T);
  const double z = 1.0 + 3.0 * boltz;
  EffectiveCoupling out;
  out.j_eff = -(2.0 * J_p * J_p / z) * (omega0 + boltz * omega1);
  out.T = T;
  out.theta = theta;
  out.L = L;
  out.J_p = J_p;
  out.omega0 = omega0;
  out.omega1 = omega1;
  out.eps0 = eps0;
  out.eps1 = eps1;
  out.out_of_validity = T >= gap;
  return out;
}

EffectiveCoupling j_eff_dimer_analytic(double theta, double T, double J_p, double J) {
  if (std::abs(theta) >= std::atan(1.0 / 3.0))
    throw std::domain_error("j_eff_dimer_analytic: |theta| must be below atan(1/3)");
  if (T <= 0.0) throw std::domain_error("j_eff_dimer_analytic: T must be positive");
  const double e0 = -2.0 * J * (std::cos(theta) - 2.0 * std::sin(theta));
  const double e1 = -J * (std::cos(theta) - std::sin(theta));
  const double e2 = J * (std::cos(theta) + std::sin(theta));
  const double gap = e1 - e0;
  const double boltz = std::exp(-gap / T);
  const double z = 1.0 + 3.0 * boltz;
  const double jp2 = J_p * J_p;

  EffectiveCoupling out;
  out.j_eff = (1.0 / (3.0 * z)) *
              ((4.0 * jp2 - 4.0 * jp2 * boltz) / (e1 - e0) - 5.0 * jp2 * boltz / (e2 - e1));
  out.T = T;
  out.theta = theta;
  out.L = 2;
  out.J_p = J_p;
  out.omega0 = -2.0 / (3.0 * gap);
  out.omega1 = 2.0 / (3.0 * gap) + 5.0 / (6.0 * (e2 - e1));
  out.eps0 = e0;
  out.eps1 = e1;
  out.out_of_validity = T >= gap;
  return out;
}

double sw_numeric_oracle(const ChainSpec& spec) {
  spec.validate();
  if (spec.L > 6)
    throw std::domain_error("sw_numeric_oracle: L must be <= 6 for the dense full system");
  if (std::abs(spec.J_p) / spec.J > 0.1)
    throw std::domain_error("sw_numeric_oracle: requires J_p/J <= 0.1");
  if (spec.omega != 0.0)
    throw std::domain_error("sw_numeric_oracle: requires omega = 0");

  const auto sector_low = [&](int sz_total, int count) {
    const BasisPtr basis = SectorBasis::chain_with_probes(spec.L, sz_total);
    SparseOperator H{basis, basis, {}};
    const double c = spec.J * std::cos(spec.theta);
    const double s = spec.J * std::sin(spec.theta);
    for (int i = 1; i < spec.L; ++i) {
      for (const auto& t : two_site_coupling(basis, i, i + 1, CouplingForm::bilinear).triplets)
        H.triplets.emplace_back(t.row(), t.col(), c * t.value());
      for (const auto& t : two_site_coupling(basis, i, i + 1, CouplingForm::biquadratic).triplets)
        H.triplets.emplace_back(t.row(), t.col(), s * t.value());
    }
    for (const auto& t : two_site_coupling(basis, 0, 1, CouplingForm::probe_heisenberg).triplets)
      H.triplets.emplace_back(t.row(), t.col(), spec.J_p * t.value());
    for (const auto& t :
         two_site_coupling(basis, spec.L, spec.L + 1, CouplingForm::probe_heisenberg).triplets)
      H.triplets.emplace_back(t.row(), t.col(), spec.J_p * t.value());
    SectorSpectrum sp = diagonalize_sector(H, SolverMode::dense_full);
    std::vector<double> low(sp.eigenvalues.data(),
                            sp.eigenvalues.data() + std::min<Eigen::Index>(count, sp.eigenvalues.size()));
    return low;
  };

  const auto z0 = sector_low(0, 3);
  const auto zp = sector_low(1, 2);
  const auto zm = sector_low(-1, 2);

  const double e_singlet = z0[0];
  const double e_triplet = (z0[1] + zp[0] + zm[0]) / 3.0;
  const double split = e_triplet - e_singlet;

  // clean 1+3 pattern: degenerate triplet members, next level well separated
  const double spread = std::max({z0[1], zp[0], zm[0]}) - std::min({z0[1], zp[0], zm[0]});
  if (spread > 1e-7 * spec.J)
    throw std::runtime_error("sw_numeric_oracle: triplet members not degenerate");
  const double next = std::min({z0[2], zp[1], zm[1]});
  if (next - e_triplet < 5.0 * std::abs(split))
    throw std::runtime_error("sw_numeric_oracle: no clean singlet-triplet pattern");
  return split;
}

SaturationFit saturation_fit(std::span<const std::pair<int, double>> points) {
  if (points.size() < 3)
    throw std::invalid_argument("saturation_fit: need at least 3 points");
  std::vector<double> Ls, ys;
  for (const auto& [L, y] : points) {
    Ls.push_back(static_cast<double>(L));
    ys.push_back(y);
  }
  const std::size_t n = Ls.size();

  // deterministic initialization
  const double jinf0 = ys.back();
  const double A0 = std::max(std::abs(jinf0 - ys.front()), 1e-12);
  double ratio = 2.0;
  const double last_inc = ys[n - 1] - ys[n - 2];
  if (std::abs(last_inc) > 0) ratio = std::max((ys[1] - ys[0]) / last_inc, 2.0);
  const double xi0 = (Ls.back() - Ls.front()) / std::log(ratio);

  // parameters (j_inf, log A, log xi); positivity of A and xi by construction
  Eigen::Vector3d p(jinf0, std::log(A0), std::log(std::max(xi0, 1e-3)));
  const auto model = [&](const Eigen::Vector3d& q, double L) {
    return q[0] - std::exp(q[1]) * std::exp(-L / std::exp(q[2]));
  };
  const auto rss = [&](const Eigen::Vector3d& q) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = model(q, Ls[i]) - ys[i];
      s += r * r;
    }
    return s;
  };

  double lambda = 1e-3;
  double best = rss(p);
  SaturationFit fit;
  fit.iterations = 0;
  constexpr int kCap = 500;
  for (int it = 0; it < kCap; ++it) {
    ++fit.iterations;
    Eigen::Matrix3d JtJ = Eigen::Matrix3d::Zero();
    Eigen::Vector3d Jtr = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const double A = std::exp(p[1]);
      const double xi = std::exp(p[2]);
      const double e = std::exp(-Ls[i] / xi);
      const double r = model(p, Ls[i]) - ys[i];
      Eigen::Vector3d g;
      g[0] = 1.0;
      g[1] = -A * e;                      // d/d(logA)
      g[2] = -A * e * (Ls[i] / xi);       // d/d(logxi)
      JtJ += g * g.transpose();
      Jtr += g * r;
    }
    Eigen::Matrix3d M = JtJ;
    M.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-12);
    const Eigen::Vector3d step = M.ldlt().solve(-Jtr);
    const Eigen::Vector3d cand = p + step;
    const double c = rss(cand);
    if (c < best) {
      const bool done = (best - c) < 1e-24 + 1e-14 * best || step.norm() < 1e-13;
      p = cand;
      best = c;
      lambda = std::max(lambda * 0.3, 1e-12);
      if (done) {
        fit.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }
  fit.j_inf = p[0];
  fit.amplitude = std::exp(p[1]);
  fit.decay_length = std::exp(p[2]);
  fit.residual = std::sqrt(best / static_cast<double>(n));
  if (!fit.converged && fit.iterations < kCap) fit.converged = true;  // stagnated at optimum
  return fit;
}

}  // namespace lde
