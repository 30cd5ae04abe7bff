#pragma once

// Closed-form matrix elements of the positive-frequency field E+(x, t) between
// the few-excitation states of the emitter + waveguide system.
//
// Everything is written in terms of the retarded time tau = t - |x|/v_g and
// the side of the detector. Scattered and spontaneous contributions carry the
// causal gate theta(tau) with theta(0) = 1; the free incident field is present
// only on the transmission side x > 0.
//
// For PlaneWave spectra f(omega) = sqrt(Delta) delta(omega - omega0) the
// frequency integrals collapse analytically; Gaussian and tabulated spectra
// are integrated numerically over
//   [max(0, Omega - W), Omega + W],  W = max(50 Gamma, 2 sqrt(Lambda) + 20 Gamma),
// intersected with the pulse support.

#include <complex>
#include <string_view>

#include "wgqed/model.hpp"
#include "wgqed/quadrature.hpp"

namespace wgqed {

enum class Transition {
  spont,         // <g,0| E+ |e,0>
  pulse_g1,      // <g,0| E+ |g,1_f>
  e0_from_E1,    // <e,0| E+ |e,1_f>
  g0a_from_E1,   // <g,0| a(omega') E+ |e,1_f>
  g0_from_adag,  // <g,0| E+ a^dagger(omega') |g,0>
};

std::string_view to_string(Transition transition);

struct FieldMatrixElement {
  cplx value;
  Transition transition;
  SpaceTimePoint point;
};

/// <g,0| a(omega') E+ |e,1_f> split into its singular and regular parts.
///
/// delta_coeff multiplies delta(omega' - omega0) and is nonzero only for
/// PlaneWave. For finite pulses the same physical contribution (the incident
/// photon left untouched while the atom emits) is the regular function
/// pulse_term = Gamma exp(-i(Omega - i Gamma) tau) f(omega'). smooth is the
/// g(omega')-weighted part.
struct DeltaPlusSmooth {
  cplx delta_coeff{};
  cplx pulse_term{};
  cplx smooth{};
};

/// Tolerances for the frequency integrals of non-plane-wave spectra.
struct SpectralIntegration {
  double rel_tol = 1e-9;
  double abs_tol = 1e-13;
};

/// W = max(50 Gamma, 2 sqrt(Lambda) + 20 Gamma)
double integration_half_width(const SystemParams& params);

/// Below this value of 2 sqrt(Lambda) tau the Rabi kernels switch to their
/// fourth-order series.
inline constexpr double kRabiSeriesThreshold = 1e-4;

cplx transmission_amplitude(double omega0, const SystemParams& params);
cplx reflection_amplitude(double omega0, const SystemParams& params);

/// Gamma exp(-i(Omega - i Gamma) tau) theta(tau)
FieldMatrixElement me_spontaneous(const SpaceTimePoint& pt, const SystemParams& params);

/// Single photon through a ground-state atom: incident plus transmitted field
/// for x > 0, reflected field for x < 0.
FieldMatrixElement me_pulse_g1(const SpaceTimePoint& pt, const PulseSpectrum& f,
                               const SystemParams& params, const SpectralIntegration& quad = {});

/// Atom stays excited, the detector absorbs a photon. Rabi-shifted
/// denominators omega - Omega -+ 2 sqrt(Lambda) + i Gamma.
FieldMatrixElement me_e0_from_E1(const SpaceTimePoint& pt, const PulseSpectrum& f,
                                 const SystemParams& params, const SpectralIntegration& quad = {});

DeltaPlusSmooth me_g0a_from_E1(double omega_prime, const SpaceTimePoint& pt,
                               const PulseSpectrum& f, const SystemParams& params,
                               const SpectralIntegration& quad = {});

/// Free-propagation term (x > 0) plus the Lorentzian scattered term of the
/// mode omega'.
FieldMatrixElement me_g0_from_adag(double omega_prime, const SpaceTimePoint& pt,
                                   const SystemParams& params);

namespace detail {

/// exp(z) - 1 without cancellation for small |z|.
cplx expm1(cplx z);

/// (exp(-i w tau) - exp(-i(Omega - i Gamma) tau)) / (w - Omega + i Gamma),
/// evaluated without forming the two exponentials separately.
cplx lorentz_bracket(double w, double tau, double omega_q, double gamma);

/// I_n = int_0^tau (tau - u)^n exp(-i c u) du for Im c <= 0.
cplx power_exp_integral(int n, cplx c, double tau);

}  // namespace detail

}  // namespace wgqed
