#include "lde/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lde {

namespace {

Eigen::Matrix2cd pauli(int i) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (i) {
    case 0: m.setIdentity(); break;
    case 1: m(0, 1) = 1; m(1, 0) = 1; break;
    case 2: m(0, 1) = std::complex<double>(0, -1); m(1, 0) = std::complex<double>(0, 1); break;
    default: m(0, 0) = 1; m(1, 1) = -1; break;
  }
  return m;
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

Eigen::Vector4cd singlet_ket() {
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi[1] = 1.0 / std::sqrt(2.0);
  psi[2] = -1.0 / std::sqrt(2.0);
  return psi;
}

// Bell-projector weights q_i = Tr[E^i rho], E^i = (1 x sigma^i) E^0 (1 x sigma^i).
std::array<double, 4> channel_weights(const Eigen::Matrix4cd& rho) {
  const Eigen::Matrix4cd e0 = singlet_ket() * singlet_ket().adjoint();
  std::array<double, 4> q{};
  for (int i = 0; i < 4; ++i) {
    const Eigen::Matrix4cd u = kron2(Eigen::Matrix2cd::Identity(), pauli(i));
    q[i] = (u * e0 * u * rho).trace().real();
  }
  return q;
}

// 64-point Gauss-Legendre nodes/weights on [-1, 1] via Newton iteration.
struct GaussLegendre {
  static constexpr int kN = 64;
  std::array<double, kN> node{}, weight{};
  GaussLegendre() {
    const int n = kN;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      node[i] = -x;
      node[n - 1 - i] = x;
      weight[i] = weight[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

}  // namespace

Eigen::Vector2cd InputQubit::ket() const {
  Eigen::Vector2cd k;
  k[0] = std::cos(theta_b / 2.0);
  k[1] = std::sin(theta_b / 2.0) * std::exp(std::complex<double>(0, phi_b));
  return k;
}

double concurrence_wootters(const TwoQubitState& state) {
  state.validate(1e-8);
  const Eigen::Matrix4cd yy = kron2(pauli(2), pauli(2));
  const Eigen::Matrix4cd R = state.rho * yy * state.rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(R);
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) {
    // eigenvalues of rho rho~ are real and non-negative up to solver noise
    const double re = std::max(es.eigenvalues()[i].real(), 0.0);
    lam[static_cast<std::size_t>(i)] = std::sqrt(re);
  }
  std::sort(lam.begin(), lam.end(), std::greater<double>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double concurrence_xstate(const TwoQubitXState& state) {
  return 2.0 / state.z_q * std::max(0.0, std::abs(state.y) - std::sqrt(state.u * state.v));
}

Eigen::Matrix2cd teleport_output(const TwoQubitState& channel, const InputQubit& input) {
  const auto q = channel_weights(channel.rho);
  const Eigen::Vector2cd psi = input.ket();
  const Eigen::Matrix2cd rho_in = psi * psi.adjoint();
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (int i = 0; i < 4; ++i) out += q[i] * pauli(i) * rho_in * pauli(i);
  return out;
}

FidelityReport average_fidelity(const TwoQubitXState& channel) {
  FidelityReport rep;
  rep.singlet_fraction = (channel.x - channel.y) / channel.z_q;
  rep.f_avg_formula = 1.0 / 3.0 + 2.0 * (channel.x - channel.y) / (3.0 * channel.z_q);
  rep.f_avg_alt = 1.0 / 6.0 + (3.0 * channel.x - 2.0 * channel.y) / (3.0 * channel.z_q);

  static const GaussLegendre gl;
  const TwoQubitState chan = channel.state();
  const auto q = channel_weights(chan.rho);
  constexpr int kPhi = 64;
  double acc = 0.0;
  for (int i = 0; i < GaussLegendre::kN; ++i) {
    const double ct = gl.node[i];
    const double theta = std::acos(ct);
    double row = 0.0;
    for (int j = 0; j < kPhi; ++j) {
      const InputQubit in{theta, 2.0 * M_PI * j / kPhi};
      const Eigen::Vector2cd psi = in.ket();
      const Eigen::Matrix2cd rho_in = psi * psi.adjoint();
      Eigen::Matrix2cd rho_out = Eigen::Matrix2cd::Zero();
      for (int k = 0; k < 4; ++k) rho_out += q[k] * pauli(k) * rho_in * pauli(k);
      row += (rho_out * rho_in).trace().real();
    }
    acc += gl.weight[i] * row / kPhi;
  }
  rep.f_avg_quadrature = acc / 2.0;  // weights integrate d(cos theta) over [-1, 1]
  return rep;
}

}  // namespace lde
