#include <cmath>

#include "doctest.h"
#include "wgqed/error.hpp"
#include "wgqed/matrix_elements.hpp"

using namespace wgqed;

namespace {

SystemParams defaults() { return SystemParams{}; }  // Omega 50, Gamma 1, Lambda 1

bool close(cplx a, cplx b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

}  // namespace

TEST_CASE("spontaneous emission element") {
  const auto p = defaults();
  const auto on_cone = me_spontaneous(SpaceTimePoint(2.0, 2.0), p).value;
  CHECK(on_cone.real() == doctest::Approx(1.0));
  CHECK(on_cone.imag() == doctest::Approx(0.0));
  CHECK(std::abs(me_spontaneous(SpaceTimePoint(-2.0, 3.0), p).value) ==
        doctest::Approx(std::exp(-1.0)));
  CHECK(me_spontaneous(SpaceTimePoint(2.0, 1.999), p).value == cplx{});
  CHECK(me_spontaneous(SpaceTimePoint(-2.0, 1.999), p).value == cplx{});
}

TEST_CASE("transmission and reflection amplitudes") {
  const auto p = defaults();
  CHECK(transmission_amplitude(50.0, p) == cplx{});
  CHECK(std::abs(reflection_amplitude(50.0, p)) == doctest::Approx(1.0));
  CHECK(std::norm(transmission_amplitude(51.0, p)) == doctest::Approx(0.5));
  CHECK(std::norm(reflection_amplitude(51.0, p)) == doctest::Approx(0.5));
  for (int i = 0; i <= 200; ++i) {
    const double w = 40.0 + 0.1 * i;
    const double sum = std::norm(transmission_amplitude(w, p)) + std::norm(reflection_amplitude(w, p));
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(transmission_amplitude(0.0, p), DomainError);
}

TEST_CASE("plane-wave pulse element approaches the stationary amplitudes") {
  const auto p = defaults();
  const double tau = 60.0;  // exp(-Gamma tau) is negligible
  for (double w0 : {50.0, 51.0, 47.5}) {
    const double density = coupling_g(w0, p) * coupling_g(w0, p) * p.delta_pw;
    const auto fwd = me_pulse_g1(SpaceTimePoint(1.0, 1.0 + tau), PlaneWave{w0}, p).value;
    const auto bwd = me_pulse_g1(SpaceTimePoint(-1.0, 1.0 + tau), PlaneWave{w0}, p).value;
    CHECK(std::norm(fwd) / density == doctest::Approx(std::norm(transmission_amplitude(w0, p))));
    CHECK(std::norm(bwd) / density == doctest::Approx(std::norm(reflection_amplitude(w0, p))));
    CHECK((std::norm(fwd) + std::norm(bwd)) / density == doctest::Approx(1.0));
  }
  CHECK(std::abs(me_pulse_g1(SpaceTimePoint(1.0, 1.0 + tau), PlaneWave{50.0}, p).value) < 1e-12);
}

// Reference values: tests/reference/reference_values.py (time-domain integrals).
TEST_CASE("gaussian-pulse elements against time-domain references") {
  const auto p = defaults();
  const PulseSpectrum f = GaussianPulse{50.5, 0.3};
  const double rel = 1e-9;
  CHECK(close(me_pulse_g1(SpaceTimePoint(1.5, 3.0), f, p).value,
              {0.10970183404850071, 0.050791063739468256}, rel));
  CHECK(close(me_pulse_g1(SpaceTimePoint(-1.0, 2.5), f, p).value,
              {-0.018405242618938672, -0.29823383345205851}, rel));
  CHECK(close(me_e0_from_E1(SpaceTimePoint(1.5, 3.0), f, p).value,
              {0.083522790983901945, 0.2839085907134388}, rel));
  CHECK(close(me_e0_from_E1(SpaceTimePoint(-1.0, 2.5), f, p).value,
              {-0.044584285683537441, -0.065116306478087962}, rel));
  const cplx smooth{-0.039874947785774843, 0.001794521108595451};
  CHECK(close(me_g0a_from_E1(50.0, SpaceTimePoint(1.5, 3.0), f, p).smooth, smooth, rel));
  CHECK(close(me_g0a_from_E1(50.0, SpaceTimePoint(-1.0, 2.5), f, p).smooth, smooth, rel));

  auto flat = p;
  flat.lambda_rabi = 0.0;
  CHECK(close(me_g0a_from_E1(50.0, SpaceTimePoint(1.5, 3.0), f, flat).smooth,
              {-0.10913682499407109, 0.016922467770887999}, rel));
}

TEST_CASE("causality gates") {
  const auto p = defaults();
  const PulseSpectrum f = GaussianPulse{50.0, 0.2};
  const SpaceTimePoint early_back(-3.0, 2.0);
  CHECK(me_pulse_g1(early_back, f, p).value == cplx{});
  CHECK(me_e0_from_E1(early_back, f, p).value == cplx{});
  CHECK(me_g0_from_adag(50.0, early_back, p).value == cplx{});
  const auto d = me_g0a_from_E1(50.0, SpaceTimePoint(3.0, 2.0), f, p);
  CHECK(d.delta_coeff == cplx{});
  CHECK(d.pulse_term == cplx{});
  CHECK(d.smooth == cplx{});

  // Before the light cone on the transmission side only the incident field is left.
  const SpaceTimePoint early_fwd(3.0, 2.0);
  const auto pw = PlaneWave{50.3};
  const cplx incident = coupling_g(50.3, p) * std::sqrt(p.delta_pw) * kI *
                        std::exp(-kI * (50.3 * (2.0 - 3.0)));
  CHECK(close(me_pulse_g1(early_fwd, pw, p).value, incident, 1e-14));
  CHECK(close(me_e0_from_E1(early_fwd, pw, p).value, incident, 1e-14));
}

TEST_CASE("e0 element on the light cone") {
  const auto p = defaults();
  const auto pw = PlaneWave{50.0};
  CHECK(std::abs(me_e0_from_E1(SpaceTimePoint(-1.0, 1.0), pw, p).value) < 1e-15);
  const auto on_cone = me_e0_from_E1(SpaceTimePoint(1.0, 1.0), pw, p).value;
  const cplx incident = coupling_g(50.0, p) * std::sqrt(p.delta_pw) * kI;
  CHECK(close(on_cone, incident, 1e-14));
}

TEST_CASE("e0 element in the Lambda -> 0 limit") {
  // With no Rabi splitting the excited atom scatters with the opposite sign
  // of the ground-state atom: e0 = 2 incident - pulse_g1.
  auto p = defaults();
  p.lambda_rabi = 1e-8;
  const PulseSpectrum f = GaussianPulse{50.4, 0.25};
  const SpaceTimePoint back(-1.5, 3.7);
  CHECK(close(me_e0_from_E1(back, f, p).value, -me_pulse_g1(back, f, p).value, 1e-6));
  const auto pw_e0 = me_e0_from_E1(SpaceTimePoint(1.0, 4.0), PlaneWave{50.5}, p).value;
  const auto pw_g1 = me_pulse_g1(SpaceTimePoint(1.0, 4.0), PlaneWave{50.5}, p).value;
  const cplx incident = coupling_g(50.5, p) * std::sqrt(p.delta_pw) * kI *
                        std::exp(-kI * (50.5 * 3.0));
  CHECK(close(pw_e0, 2.0 * incident - pw_g1, 1e-6));
}

TEST_CASE("g0a element") {
  const auto p = defaults();
  const double tau = 1.3;
  const SpaceTimePoint pt(2.0, 2.0 + tau);
  SUBCASE("plane-wave delta coefficient") {
    const auto d = me_g0a_from_E1(50.2, pt, PlaneWave{50.0}, p);
    CHECK(std::abs(d.delta_coeff) == doctest::Approx(std::sqrt(p.delta_pw) * std::exp(-tau)));
    CHECK(d.pulse_term == cplx{});
  }
  SUBCASE("finite pulse term") {
    const PulseSpectrum f = GaussianPulse{50.0, 0.3};
    const auto d = me_g0a_from_E1(50.2, pt, f, p);
    CHECK(d.delta_coeff == cplx{});
    CHECK(std::abs(d.pulse_term) ==
          doctest::Approx(std::exp(-tau) * std::abs(pulse_amplitude(f, 50.2))));
  }
  SUBCASE("series branch joins the closed form") {
    auto below = p;
    auto above = p;
    const double beta = kRabiSeriesThreshold / tau;
    below.lambda_rabi = std::pow(0.5 * beta * (1.0 - 1e-6), 2);
    above.lambda_rabi = std::pow(0.5 * beta * (1.0 + 1e-6), 2);
    const PulseSpectrum f = GaussianPulse{50.2, 0.3};
    const cplx s_below = me_g0a_from_E1(50.0, pt, f, below).smooth;
    const cplx s_above = me_g0a_from_E1(50.0, pt, f, above).smooth;
    CHECK(close(s_below, s_above, 1e-8));
    const cplx pw_below = me_g0a_from_E1(50.0, pt, PlaneWave{50.2}, below).smooth;
    const cplx pw_above = me_g0a_from_E1(50.0, pt, PlaneWave{50.2}, above).smooth;
    CHECK(close(pw_below, pw_above, 1e-8));
  }
  CHECK_THROWS_AS(me_g0a_from_E1(0.0, pt, PlaneWave{50.0}, p), DomainError);
}

TEST_CASE("g0 element from a created photon") {
  const auto p = defaults();
  const double g = coupling_g(50.0, p);
  const auto late = me_g0_from_adag(50.0, SpaceTimePoint(1.0, 61.0), p).value;
  const cplx free = kI * g * std::exp(-kI * (50.0 * 60.0));
  const cplx scattered = g * std::exp(-kI * (50.0 * 60.0)) / kI;
  CHECK(close(late, free + scattered, 1e-12));
  CHECK(std::abs(late) < 1e-12);  // resonant extinction

  for (double t : {5.0, 20.0, 100.0}) {
    const auto far = me_g0_from_adag(150.0, SpaceTimePoint(-1.0, t), p).value;
    CHECK(std::abs(far) <= g * 2.0 / 100.0);
  }
}

TEST_CASE("detail helpers") {
  using detail::expm1;
  const cplx z{1e-10, -2e-10};
  CHECK(close(expm1(z), z + 0.5 * z * z, 1e-15));
  CHECK(close(expm1({0.3, 2.0}), std::exp(cplx{0.3, 2.0}) - 1.0, 1e-14));

  // I_0 closed form and the recursion/series switch at |c tau| = 2.
  const cplx c{0.7, -1.0};
  const double tau = 1.5;
  const cplx i0 = (1.0 - std::exp(-kI * c * tau)) / (kI * c);
  CHECK(close(detail::power_exp_integral(0, c, tau), i0, 1e-14));
  for (int n : {1, 3, 5}) {
    // midpoint-rule reference with Richardson extrapolation
    auto direct = [&](int m) {
      const double h = tau / m;
      cplx s{};
      for (int j = 0; j < m; ++j) {
        const double u = (j + 0.5) * h;
        s += std::pow(tau - u, n) * std::exp(-kI * c * u) * h;
      }
      return s;
    };
    const cplx ref = (4.0 * direct(20000) - direct(10000)) / 3.0;
    CHECK(close(detail::power_exp_integral(n, c, tau), ref, 1e-10));
    const double t_edge = 2.0 / std::abs(c);
    CHECK(close(detail::power_exp_integral(n, c, t_edge * (1 - 1e-9)),
                detail::power_exp_integral(n, c, t_edge * (1 + 1e-9)), 1e-7));
  }
  CHECK(detail::power_exp_integral(3, c, 0.0) == cplx{});
}
