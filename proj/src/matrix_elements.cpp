#include "wgqed/matrix_elements.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "wgqed/error.hpp"

namespace wgqed {

namespace detail {

cplx expm1(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  const double s = std::sin(0.5 * y);
  const double re = std::expm1(x) * std::cos(y) - 2.0 * s * s;
  const double im = std::exp(x) * std::sin(y);
  return {re, im};
}

cplx lorentz_bracket(double w, double tau, double omega_q, double gamma) {
  const cplx den{w - omega_q, gamma};
  return -std::exp(-kI * (w * tau)) * expm1(kI * tau * den) / den;
}

cplx power_exp_integral(int n, cplx c, double tau) {
  if (tau == 0.0) return 0.0;
  const cplx ict = kI * c * tau;
  if (std::abs(ict) < 2.0) {
    // tau^(n+1) n! sum_m (-i c tau)^m / (n + m + 1)!
    cplx term = 1.0 / static_cast<double>(n + 1);
    cplx sum = term;
    for (int m = 0; m < 80; ++m) {
      term *= -ict / static_cast<double>(n + m + 2);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return std::pow(tau, n + 1) * sum;
  }
  const cplx ic = kI * c;
  cplx value = -expm1(-ict) / ic;
  for (int k = 1; k <= n; ++k) value = (std::pow(tau, k) - static_cast<double>(k) * value) / ic;
  return value;
}

}  // namespace detail

namespace {

using detail::lorentz_bracket;

cplx decaying_phase(double tau, const SystemParams& p) {
  return std::exp(cplx{-p.gamma * tau, -p.omega_q * tau});
}

// Integrates g(w) f(w) kernel(w) over the spectral window, or evaluates it at
// omega0 times g(omega0) sqrt(Delta) for a plane wave.
cplx pulse_integral(const PulseSpectrum& f, const SystemParams& params,
                    const SpectralIntegration& quad, double tau_max,
                    const std::function<cplx(double)>& kernel) {
  if (const auto* pw = std::get_if<PlaneWave>(&f)) {
    return coupling_g(pw->omega0, params) * std::sqrt(params.delta_pw) * kernel(pw->omega0);
  }
  const double half_width = integration_half_width(params);
  auto [lo, hi] = pulse_support(f);
  lo = std::max({lo, params.omega_q - half_width, 0.0});
  hi = std::min(hi, params.omega_q + half_width);
  if (!(hi > lo)) return 0.0;
  // The floor at omega = 0 is exclusive: coupling_g is undefined there.
  if (lo == 0.0) lo = std::nextafter(0.0, 1.0);

  SpectralKernel k;
  k.lo = lo;
  k.hi = hi;
  k.feature_scale = std::min(params.gamma, pulse_feature_scale(f));
  k.evaluate = [&](double w) { return coupling_g(w, params) * pulse_amplitude(f, w) * kernel(w); };
  QuadratureOptions options;
  options.rel_tol = quad.rel_tol;
  options.abs_tol = quad.abs_tol;
  options.plan = oscillation_guard(k, tau_max);
  return integrate(k, options).value;
}

}  // namespace

std::string_view to_string(Transition transition) {
  switch (transition) {
    case Transition::spont: return "spont";
    case Transition::pulse_g1: return "pulse_g1";
    case Transition::e0_from_E1: return "e0_from_E1";
    case Transition::g0a_from_E1: return "g0a_from_E1";
    case Transition::g0_from_adag: return "g0_from_adag";
  }
  return "unknown";
}

double integration_half_width(const SystemParams& params) {
  return std::max(50.0 * params.gamma, params.rabi_shift() + 20.0 * params.gamma);
}

cplx transmission_amplitude(double omega0, const SystemParams& params) {
  if (!(omega0 > 0.0)) throw DomainError("transmission_amplitude: omega0 must be positive");
  const double detuning = omega0 - params.omega_q;
  return detuning / cplx{detuning, params.gamma};
}

cplx reflection_amplitude(double omega0, const SystemParams& params) {
  if (!(omega0 > 0.0)) throw DomainError("reflection_amplitude: omega0 must be positive");
  const double detuning = omega0 - params.omega_q;
  return -kI * params.gamma / cplx{detuning, params.gamma};
}

FieldMatrixElement me_spontaneous(const SpaceTimePoint& pt, const SystemParams& params) {
  const double tau = pt.retarded_time(params.v_g);
  const cplx value = tau >= 0.0 ? params.gamma * decaying_phase(tau, params) : cplx{};
  return {value, Transition::spont, pt};
}

FieldMatrixElement me_pulse_g1(const SpaceTimePoint& pt, const PulseSpectrum& f,
                               const SystemParams& params, const SpectralIntegration& quad) {
  validate_pulse(f);
  const double tau = pt.retarded_time(params.v_g);
  const bool causal = tau >= 0.0;
  const bool incident = pt.forward();
  if (!causal && !incident) return {0.0, Transition::pulse_g1, pt};
  const double t_free = pt.t() - pt.x() / params.v_g;  // = tau when x > 0
  const double g = params.gamma;
  const double om = params.omega_q;
  const cplx value = pulse_integral(f, params, quad, std::max(tau, 0.0), [&](double w) {
    cplx k{};
    if (incident) k += kI * std::exp(-kI * (w * t_free));
    if (causal) k += g * lorentz_bracket(w, tau, om, g);
    return k;
  });
  return {value, Transition::pulse_g1, pt};
}

FieldMatrixElement me_e0_from_E1(const SpaceTimePoint& pt, const PulseSpectrum& f,
                                 const SystemParams& params, const SpectralIntegration& quad) {
  validate_pulse(f);
  const double tau = pt.retarded_time(params.v_g);
  const bool causal = tau >= 0.0;
  const bool incident = pt.forward();
  if (!causal && !incident) return {0.0, Transition::e0_from_E1, pt};
  const double t_free = pt.t() - pt.x() / params.v_g;
  const double g = params.gamma;
  const double om = params.omega_q;
  const double beta = params.rabi_shift();
  const cplx value = pulse_integral(f, params, quad, std::max(tau, 0.0), [&](double w) {
    cplx k{};
    if (incident) k += kI * std::exp(-kI * (w * t_free));
    if (causal) {
      k -= 0.5 * g *
           (lorentz_bracket(w - beta, tau, om, g) + lorentz_bracket(w + beta, tau, om, g));
    }
    return k;
  });
  return {value, Transition::e0_from_E1, pt};
}

DeltaPlusSmooth me_g0a_from_E1(double omega_prime, const SpaceTimePoint& pt,
                               const PulseSpectrum& f, const SystemParams& params,
                               const SpectralIntegration& quad) {
  validate_pulse(f);
  if (!(omega_prime > 0.0)) throw DomainError("me_g0a_from_E1: omega' must be positive");
  const double tau = pt.retarded_time(params.v_g);
  DeltaPlusSmooth out;
  if (tau < 0.0) return out;

  const double g = params.gamma;
  const double om = params.omega_q;
  const cplx spont = g * decaying_phase(tau, params);
  if (is_plane_wave(f)) {
    out.delta_coeff = spont * std::sqrt(params.delta_pw);
  } else {
    out.pulse_term = spont * pulse_amplitude(f, omega_prime);
  }

  const double beta = params.rabi_shift();
  const double g_prime = coupling_g(omega_prime, params);
  std::function<cplx(double)> kernel;
  if (beta * tau < kRabiSeriesThreshold) {
    // sin(beta s)/beta = s - beta^2 s^3/6 + beta^4 s^5/120
    const double b2 = beta * beta;
    kernel = [=](double w) {
      const cplx c{om - w, -g};
      const cplx series = detail::power_exp_integral(1, c, tau) -
                          b2 / 6.0 * detail::power_exp_integral(3, c, tau) +
                          b2 * b2 / 120.0 * detail::power_exp_integral(5, c, tau);
      return -g * g_prime * std::exp(-kI * (w * tau)) * series;
    };
  } else {
    kernel = [=](double w) {
      return g * g_prime / (2.0 * beta) *
             (lorentz_bracket(w + beta, tau, om, g) - lorentz_bracket(w - beta, tau, om, g));
    };
  }
  out.smooth = pulse_integral(f, params, quad, tau, kernel);
  return out;
}

FieldMatrixElement me_g0_from_adag(double omega_prime, const SpaceTimePoint& pt,
                                   const SystemParams& params) {
  if (!(omega_prime > 0.0)) throw DomainError("me_g0_from_adag: omega' must be positive");
  const double tau = pt.retarded_time(params.v_g);
  const double g_prime = coupling_g(omega_prime, params);
  cplx value{};
  if (pt.forward()) value += kI * g_prime * std::exp(-kI * (omega_prime * (pt.t() - pt.x() / params.v_g)));
  if (tau >= 0.0) {
    value += params.gamma * g_prime * lorentz_bracket(omega_prime, tau, params.omega_q, params.gamma);
  }
  return {value, Transition::g0_from_adag, pt};
}

}  // namespace wgqed
