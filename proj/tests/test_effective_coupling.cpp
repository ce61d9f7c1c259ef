#include <doctest.h>

#include <cmath>
#include <vector>

#include "lde/effective_coupling.hpp"

using namespace lde;

namespace {

ChainSpec spec_of(int L, double theta, double J_p = 0.1) {
  ChainSpec s;
  s.L = L;
  s.theta = theta;
  s.J_p = J_p;
  return s;
}

}  // namespace

TEST_CASE("omega sums: dimer closed forms") {
  // ground level: the singlet only connects to the triplet, giving -2/(3 J)
  const OmegaSum om0 = omega_sum(spec_of(2, 0.0), 0, OmegaBackend::full_spectrum);
  CHECK(om0.value == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
  CHECK(om0.level == 0);
  CHECK(om0.i == 1);
  CHECK(om0.j == 2);
  CHECK(om0.excluded_terms == 0);

  // triplet level: ground term 2/(3 gap) plus quintet term 5/(6 (e2-e1))
  const OmegaSum om1 = omega_sum(spec_of(2, 0.0), 1, OmegaBackend::full_spectrum);
  CHECK(om1.value == doctest::Approx(2.0 / 3.0 + 5.0 / 12.0).epsilon(1e-12));

  // both backends agree on the dimer
  const OmegaSum r0 = omega_sum(spec_of(2, 0.0), 0, OmegaBackend::resolvent);
  const OmegaSum r1 = omega_sum(spec_of(2, 0.0), 1, OmegaBackend::resolvent);
  CHECK(r0.value == doctest::Approx(om0.value).epsilon(1e-10));
  CHECK(r1.value == doctest::Approx(om1.value).epsilon(1e-10));

  CHECK_THROWS_AS(omega_sum(spec_of(2, 0.0), 2, OmegaBackend::full_spectrum), std::domain_error);
}

TEST_CASE("omega sums: backend agreement at L = 4 and 6") {
  for (const int L : {4, 6}) {
    for (const double theta : {0.0, 0.08}) {
      for (const int level : {0, 1}) {
        const double full =
            omega_sum(spec_of(L, theta), level, OmegaBackend::full_spectrum).value;
        const double res = omega_sum(spec_of(L, theta), level, OmegaBackend::resolvent).value;
        CHECK(std::abs(full - res) / std::abs(full) < 1e-8);
      }
    }
  }
}

TEST_CASE("omega sums: ground-level negativity for even chains") {
  for (const int L : {2, 4, 6})
    CHECK(omega_sum(spec_of(L, 0.0), 0, OmegaBackend::full_spectrum).value < 0.0);
}

TEST_CASE("omega sums: isotropy and cross-term selection rules") {
  const ChainSpec spec = spec_of(4, 0.05);
  for (const int level : {0, 1}) {
    const double z = omega_sum_component(spec, level, SpinComponent::z, SpinComponent::z);
    const double plus = omega_sum_component(spec, level, SpinComponent::plus, SpinComponent::plus);
    const double minus =
        omega_sum_component(spec, level, SpinComponent::minus, SpinComponent::minus);
    CHECK(std::abs(plus - 2.0 * z) / std::abs(2.0 * z) < 1e-8);
    CHECK(std::abs(minus - 2.0 * z) / std::abs(2.0 * z) < 1e-8);
    CHECK(std::abs(omega_sum_component(spec, level, SpinComponent::z, SpinComponent::plus)) <
          1e-10);
    CHECK(std::abs(omega_sum_component(spec, level, SpinComponent::plus, SpinComponent::minus)) <
          1e-10);
  }
}

TEST_CASE("j_eff equals the dimer closed form on the full grid") {
  for (const double theta : {-0.1, 0.0, 0.1}) {
    for (const double T : {0.05, 0.1, 0.3}) {
      const double want = j_eff_dimer_analytic(theta, T, 0.1).j_eff;
      const double got = j_eff(spec_of(2, theta), T, OmegaBackend::full_spectrum).j_eff;
      CHECK(std::abs(got - want) / std::abs(want) < 1e-10);
    }
  }
}

TEST_CASE("j_eff: frozen anchors") {
  // independently computed golden value at theta = 0, J_p = 0.1, T = 0.1
  const EffectiveCoupling a = j_eff_dimer_analytic(0.0, 0.1, 0.1);
  CHECK(a.j_eff == doctest::Approx(0.013330534052259473).epsilon(1e-12));

  // zero-temperature limit 4 J_p^2 / (3 J)
  const EffectiveCoupling cold = j_eff_dimer_analytic(0.0, 1e-5, 0.1);
  CHECK(cold.j_eff == doctest::Approx(4.0 * 0.01 / 3.0).epsilon(1e-8));

  // slight biquadratic admixture enhances the coupling
  CHECK(j_eff_dimer_analytic(0.05, 0.05, 0.1).j_eff > j_eff_dimer_analytic(0.0, 0.05, 0.1).j_eff);

  // temperature weakens it
  const ChainSpec d = spec_of(2, 0.0);
  CHECK(j_eff(d, 0.05, OmegaBackend::full_spectrum).j_eff >
        j_eff(d, 0.2, OmegaBackend::full_spectrum).j_eff);

  CHECK_THROWS_AS(j_eff_dimer_analytic(0.0, -0.1, 0.1), std::domain_error);
  CHECK_THROWS_AS(j_eff_dimer_analytic(0.5, 0.1, 0.1), std::domain_error);
}

TEST_CASE("j_eff: quadratic probe-coupling scaling and field consistency") {
  const EffectiveCoupling base = j_eff(spec_of(4, 0.0, 0.05), 0.1, OmegaBackend::full_spectrum);
  const EffectiveCoupling scaled = j_eff(spec_of(4, 0.0, 0.15), 0.1, OmegaBackend::full_spectrum);
  CHECK(scaled.j_eff == doctest::Approx(9.0 * base.j_eff).epsilon(1e-13));

  // stored ingredients reproduce the value exactly
  const double gap = base.eps1 - base.eps0;
  const double boltz = std::exp(-gap / base.T);
  const double z = 1.0 + 3.0 * boltz;
  const double recomputed =
      -(2.0 * base.J_p * base.J_p / z) * (base.omega0 + boltz * base.omega1);
  CHECK(recomputed == doctest::Approx(base.j_eff).epsilon(1e-15));
  CHECK(base.j_eff > 0.0);
  CHECK_FALSE(base.out_of_validity);
}

TEST_CASE("full-system splitting oracle") {
  // decoupled probes: exactly degenerate singlet and triplet
  CHECK(std::abs(sw_numeric_oracle(spec_of(2, 0.0, 0.0))) < 1e-12);

  // dimer chain at weak coupling matches the perturbative value within 5%
  const double split2 = sw_numeric_oracle(spec_of(2, 0.0, 0.01));
  const double pert2 = 4.0 * 0.01 * 0.01 / 3.0;
  CHECK(std::abs(split2 - pert2) / pert2 < 0.05);

  // L = 4 against the resolvent-sum route at T -> 0
  const double split4 = sw_numeric_oracle(spec_of(4, 0.0, 0.01));
  const CouplingContext ctx = coupling_context(spec_of(4, 0.0, 0.01), OmegaBackend::full_spectrum);
  const double pert4 = -2.0 * 0.01 * 0.01 * ctx.omega0;
  CHECK(std::abs(split4 - pert4) / pert4 < 0.05);

  CHECK_THROWS_AS(sw_numeric_oracle(spec_of(8, 0.0, 0.01)), std::domain_error);
  CHECK_THROWS_AS(sw_numeric_oracle(spec_of(2, 0.0, 0.2)), std::domain_error);
}

TEST_CASE("saturation fit recovers synthetic data") {
  std::vector<std::pair<int, double>> pts;
  const double jinf = 0.02, A = 0.01, xi = 2.0;
  for (const int L : {4, 6, 8, 10}) pts.emplace_back(L, jinf - A * std::exp(-L / xi));
  const SaturationFit fit = saturation_fit(pts);
  CHECK(fit.j_inf == doctest::Approx(jinf).epsilon(1e-6));
  CHECK(fit.amplitude == doctest::Approx(A).epsilon(1e-5));
  CHECK(fit.decay_length == doctest::Approx(xi).epsilon(1e-5));
  CHECK(fit.residual < 1e-9);
  CHECK(fit.amplitude > 0.0);
  CHECK(fit.decay_length > 0.0);

  const std::vector<std::pair<int, double>> few = {{4, 0.1}, {6, 0.2}};
  CHECK_THROWS_AS(saturation_fit(few), std::invalid_argument);
}

TEST_CASE("coupling context sweeps temperature consistently") {
  const CouplingContext ctx = coupling_context(spec_of(4, 0.0), OmegaBackend::full_spectrum);
  const EffectiveCoupling direct = j_eff(spec_of(4, 0.0), 0.07, OmegaBackend::full_spectrum);
  CHECK(ctx.at(0.07).j_eff == doctest::Approx(direct.j_eff).epsilon(1e-14));
  CHECK(ctx.at(0.07).out_of_validity == direct.out_of_validity);
  CHECK_THROWS_AS(ctx.at(0.0), std::domain_error);
}

TEST_CASE("resolvent solver non-convergence is reported") {
  ComputeOptions strangled;
  strangled.cg_max_iter = 1;
  strangled.cg_tol = 1e-14;
  CHECK_THROWS_AS(omega_sum(spec_of(6, 0.0), 0, OmegaBackend::resolvent, strangled),
                  std::runtime_error);
}
