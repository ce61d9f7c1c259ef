#include "lde/open_system.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lde {

namespace {

const Eigen::Matrix2cd kSigmaMinus = [] {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 1) = 1.0;  // |g><e|
  return m;
}();

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

}  // namespace

void TwoQubitState::validate(double tol) const {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw std::domain_error("TwoQubitState: not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol)
    throw std::domain_error("TwoQubitState: trace != 1");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
  if (es.eigenvalues().minCoeff() < -std::max(tol, 1e-10))
    throw std::domain_error("TwoQubitState: negative eigenvalue");
}

Eigen::Matrix4cd TwoQubitXState::density() const {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = u;
  m(1, 1) = x;
  m(2, 2) = x;
  m(3, 3) = v;
  m(1, 2) = y;
  m(2, 1) = y;
  return m / z_q;
}

TwoQubitXState thermal_pair_state(double j_eff, double omega, double T) {
  if (T <= 0.0) throw std::domain_error("thermal_pair_state: T must be positive");
  TwoQubitXState s;
  s.u = std::exp(-(j_eff / 4.0 - omega) / T);
  s.v = std::exp(-(j_eff / 4.0 + omega) / T);
  s.x = 0.5 * (std::exp(-j_eff / (4.0 * T)) + std::exp(3.0 * j_eff / (4.0 * T)));
  s.y = 0.5 * (std::exp(-j_eff / (4.0 * T)) - std::exp(3.0 * j_eff / (4.0 * T)));
  s.z_q = s.u + 2.0 * s.x + s.v;
  return s;
}

std::array<Eigen::Matrix2cd, 4> gad_kraus(double p, double n_bar) {
  if (p < 0.0 || p > 1.0) throw std::domain_error("gad_kraus: p must lie in [0,1]");
  if (n_bar < 0.0) throw std::domain_error("gad_kraus: n_bar must be >= 0");
  const double denom = 2.0 * n_bar + 1.0;
  const double q = std::sqrt(1.0 - p);
  std::array<Eigen::Matrix2cd, 4> K;
  for (auto& k : K) k = Eigen::Matrix2cd::Zero();
  const double c0 = std::sqrt((n_bar + 1.0) / denom);
  K[0](0, 0) = c0;
  K[0](1, 1) = c0 * q;
  K[1](0, 1) = std::sqrt((n_bar + 1.0) * p / denom);
  const double c2 = std::sqrt(n_bar / denom);
  K[2](0, 0) = c2 * q;
  K[2](1, 1) = c2;
  K[3](1, 0) = std::sqrt(n_bar * p / denom);
  return K;
}

double p_of_t(double t, const NoiseParams& noise) {
  if (t < 0.0) throw std::domain_error("p_of_t: t must be >= 0");
  return 1.0 - std::exp(-2.0 * noise.gamma * (2.0 * noise.n_bar + 1.0) * t);
}

TwoQubitState kraus_apply(const TwoQubitState& state, double p, double n_bar) {
  const auto K = gad_kraus(p, n_bar);
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
  for (const auto& ka : K)
    for (const auto& kb : K) {
      const Eigen::Matrix4cd kk = kron2(ka, kb);
      out += kk * state.rho * kk.adjoint();
    }
  return {out};
}

TwoQubitState kraus_evolve(const TwoQubitState& state0, double t, const NoiseParams& noise) {
  return kraus_apply(state0, p_of_t(t, noise), noise.n_bar);
}

TwoQubitXState xstate_elements(double j_eff, double omega, double T, double p, double n_bar) {
  if (T <= 0.0) throw std::domain_error("xstate_elements: T must be positive");
  if (p < 0.0 || p > 1.0) throw std::domain_error("xstate_elements: p must lie in [0,1]");
  if (n_bar < 0.0) throw std::domain_error("xstate_elements: n_bar must be >= 0");
  const double a = n_bar * p / (2.0 * n_bar + 1.0);
  const double eg = std::exp(-(j_eff / 4.0 - omega) / T);   // |gg> weight
  const double ee = std::exp(-(j_eff / 4.0 + omega) / T);   // |ee> weight
  const double mid = std::exp(-j_eff / (4.0 * T)) + std::exp(3.0 * j_eff / (4.0 * T));
  TwoQubitXState s;
  s.u = (1.0 - a) * (1.0 - a) * eg + a * a * ee + a * (1.0 - a) * mid;
  s.v = (1.0 - a) * (1.0 - a) * ee + a * a * eg + a * (1.0 - a) * mid;
  s.x = a * (1.0 - a) * (ee + eg) + 0.5 * ((1.0 - a) * (1.0 - a) + a * a) * mid;
  s.y = 0.5 * (1.0 - p) * (std::exp(-j_eff / (4.0 * T)) - std::exp(3.0 * j_eff / (4.0 * T)));
  s.z_q = eg + ee + mid;  // normalization fixed at t = 0
  return s;
}

Eigen::Matrix4cd pair_hamiltonian(double j_eff, double omega) {
  Eigen::Matrix2cd sz = Eigen::Matrix2cd::Zero();
  sz(0, 0) = -0.5;  // |g>
  sz(1, 1) = 0.5;
  Eigen::Matrix2cd sx = Eigen::Matrix2cd::Zero();
  sx(0, 1) = 0.5;
  sx(1, 0) = 0.5;
  Eigen::Matrix2cd sy = Eigen::Matrix2cd::Zero();
  sy(0, 1) = std::complex<double>(0, -0.5);
  sy(1, 0) = std::complex<double>(0, 0.5);
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::Matrix4cd h = j_eff * (kron2(sx, sx) + kron2(sy, sy) + kron2(sz, sz));
  h += omega * (kron2(sz, id) + kron2(id, sz));
  return h;
}

Eigen::Matrix4cd lindblad_rhs(const Eigen::Matrix4cd& rho, const Eigen::Matrix4cd& h_eff,
                              const NoiseParams& noise) {
  const std::complex<double> i1(0.0, 1.0);
  Eigen::Matrix4cd out = -i1 * (h_eff * rho - rho * h_eff);
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix4cd sms[2] = {kron2(kSigmaMinus, id), kron2(id, kSigmaMinus)};
  for (const auto& sm : sms) {
    const Eigen::Matrix4cd sp = sm.adjoint();
    const Eigen::Matrix4cd spsm = sp * sm;
    const Eigen::Matrix4cd smsp = sm * sp;
    out += (noise.n_bar + 1.0) * noise.gamma *
           (2.0 * sm * rho * sp - rho * spsm - spsm * rho);
    out += noise.n_bar * noise.gamma * (2.0 * sp * rho * sm - rho * smsp - smsp * rho);
  }
  return out;
}

namespace {

// Dormand-Prince 5(4) embedded pair.
struct Dopri {
  static constexpr int kStages = 7;
  double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  double b5[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
  double b4[7] = {5179.0 / 57600, 0.0,        7571.0 / 16695, 393.0 / 640,
                  -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
};

}  // namespace

Trajectory integrate_master_equation(const TwoQubitState& state0, HEffMode mode, double j_eff,
                                     double omega, const NoiseParams& noise,
                                     std::span<const double> t_grid, double tol) {
  if (t_grid.empty() || t_grid.front() < 0.0)
    throw std::invalid_argument("integrate_master_equation: t_grid must start at t >= 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (t_grid[i] <= t_grid[i - 1])
      throw std::invalid_argument("integrate_master_equation: t_grid must ascend");

  const Eigen::Matrix4cd H =
      mode == HEffMode::interacting ? pair_hamiltonian(j_eff, omega) : pair_hamiltonian(0.0, omega);
  const auto f = [&](const Eigen::Matrix4cd& r) { return lindblad_rhs(r, H, noise); };

  static const Dopri tab;
  Trajectory traj;
  traj.t.assign(t_grid.begin(), t_grid.end());

  Eigen::Matrix4cd y = state0.rho;
  double t = 0.0;
  const double t_end = t_grid.back();
  double h = std::min(1e-2, t_end > 0 ? t_end / 10.0 : 1e-2);
  std::size_t next = 0;

  // emit t = 0 samples directly
  while (next < t_grid.size() && t_grid[next] <= 0.0) {
    traj.rho.push_back(y);
    traj.trace_drift.push_back(std::abs(y.trace().real() - 1.0));
    ++next;
  }

  Eigen::Matrix4cd k[Dopri::kStages];
  Eigen::Matrix4cd y_prev = y;
  double t_prev = t;
  Eigen::Matrix4cd f_prev = f(y);

  while (next < t_grid.size()) {
    if (t + h > t_end) h = t_end - t;
    // one attempted step
    k[0] = f_prev;
    for (int s = 1; s < Dopri::kStages; ++s) {
      Eigen::Matrix4cd acc = y;
      for (int j = 0; j < s; ++j) acc += h * tab.a[s][j] * k[j];
      k[s] = f(acc);
    }
    Eigen::Matrix4cd y5 = y, y4 = y;
    for (int s = 0; s < Dopri::kStages; ++s) {
      y5 += h * tab.b5[s] * k[s];
      y4 += h * tab.b4[s] * k[s];
    }
    const double err = (y5 - y4).cwiseAbs().maxCoeff();
    const double scale = tol * std::max(1.0, y.cwiseAbs().maxCoeff());
    if (err <= scale) {
      t_prev = t;
      y_prev = y;
      t += h;
      y = y5;
      f_prev = k[6];  // FSAL
      // sample every requested grid point inside (t_prev, t] by cubic Hermite
      while (next < t_grid.size() && t_grid[next] <= t + 1e-15) {
        const double tq = t_grid[next];
        Eigen::Matrix4cd yq;
        if (tq >= t) {
          yq = y;
        } else {
          const double th = (tq - t_prev) / (t - t_prev);
          const double dt = t - t_prev;
          const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
          const double h10 = th * (1 - th) * (1 - th);
          const double h01 = th * th * (3 - 2 * th);
          const double h11 = th * th * (th - 1);
          yq = h00 * y_prev + h10 * dt * k[0] + h01 * y + h11 * dt * f_prev;
        }
        const double drift = std::abs(yq.trace().real() - 1.0);
        if (drift > 1e-12) yq /= yq.trace().real();
        traj.rho.push_back(yq);
        traj.trace_drift.push_back(drift);
        ++next;
      }
      h *= std::clamp(0.9 * std::pow(scale / std::max(err, 1e-300), 0.2), 0.2, 5.0);
    } else {
      h *= std::clamp(0.9 * std::pow(scale / err, 0.2), 0.1, 1.0);
    }
    if (h < 1e-14 * std::max(1.0, t_end)) {
      std::ostringstream msg;
      msg << "integrate_master_equation: step size underflow at t = " << t;
      throw std::runtime_error(msg.str());
    }
  }
  return traj;
}

}  // namespace lde
