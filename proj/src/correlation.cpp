#include "wgqed/correlation.hpp"

#include <cmath>

#include "wgqed/error.hpp"

namespace wgqed {

namespace {

cplx retarded_decay(double detuning_from_qubit, double gamma, double dt) {
  // exp(-i(Omega - omega0 - i Gamma) dt) with detuning_from_qubit = omega0 - Omega
  return std::exp(cplx{-gamma * dt, detuning_from_qubit * dt});
}

cplx one_minus_retarded_decay(double detuning_from_qubit, double gamma, double dt) {
  return -detail::expm1(cplx{-gamma * dt, detuning_from_qubit * dt});
}

double unit_lorentzian(double detuning, double gamma) {
  return gamma * gamma / (detuning * detuning + gamma * gamma);
}

}  // namespace

G1Result g1_spontaneous(const SpaceTimePoint& pt, const SystemParams& params) {
  const double v = std::norm(me_spontaneous(pt, params).value);
  return {v, pt, {{"spont", v}}};
}

G1Result g1_pulse(const SpaceTimePoint& pt, const PulseSpectrum& f, const SystemParams& params,
                  const SpectralIntegration& quad) {
  const double v = std::norm(me_pulse_g1(pt, f, params, quad).value);
  return {v, pt, {{"pulse", v}}};
}

double plane_wave_density(double omega0, const SystemParams& params) {
  const double g = coupling_g(omega0, params);
  return g * g * params.delta_pw;
}

G1Result g1_two_excitation(const SpaceTimePoint& pt, double omega0, const SystemParams& params) {
  if (!(omega0 > 0.0)) throw DomainError("g1_two_excitation: omega0 must be positive");
  const double tau = pt.retarded_time(params.v_g);
  double e0 = 0.0;
  double photon = 0.0;
  if (tau < 0.0) {
    e0 = pt.forward() ? 1.0 : 0.0;
  } else {
    const double gamma = params.gamma;
    const double detuning = omega0 - params.omega_q;
    const double beta = params.rabi_shift();
    const cplx lower = 1.0 / cplx{detuning - beta, gamma};
    const cplx upper = 1.0 / cplx{detuning + beta, gamma};
    const cplx rot = std::exp(kI * (beta * tau));
    const cplx a = lower * rot;
    const cplx b = upper * std::conj(rot);
    if (pt.forward()) {
      e0 = std::norm(1.0 + kI * (0.5 * gamma) * (a + b));
    } else {
      e0 = 0.25 * gamma * gamma * std::norm(a + b);
    }
    photon = gamma * gamma / 16.0 * std::norm(a - b);
  }
  return {e0 + photon, pt, {{"e0", e0}, {"photon", photon}}};
}

double g1_av_spectrum(double omega0, Side side, const SystemParams& params) {
  const double detuning = omega0 - params.omega_q;
  const double beta = params.rabi_shift();
  const double lorentz = unit_lorentzian(detuning + beta, params.gamma) +
                         unit_lorentzian(detuning - beta, params.gamma);
  const double base = side == Side::positive ? 1.0 : 0.0;
  return base + 5.0 / 16.0 * lorentz;
}

double g1_av_numeric(double omega0, Side side, const SystemParams& params, int samples) {
  if (!(params.lambda_rabi > 0.0)) {
    throw DomainError("g1_av_numeric: averaging period needs Lambda > 0");
  }
  if (samples < 1) throw ConfigError("g1_av_numeric: samples must be positive");
  const double period = kPi / std::sqrt(params.lambda_rabi);
  const double x = side == Side::positive ? 1.0 : -1.0;
  const double t0 = std::abs(x) / params.v_g;
  double sum = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double tau = period * (k + 0.5) / samples;
    sum += g1_two_excitation(SpaceTimePoint(x, t0 + tau), omega0, params).value;
  }
  return sum / samples;
}

std::string_view to_string(Geometry geometry) {
  switch (geometry) {
    case Geometry::pp: return "++";
    case Geometry::mm: return "--";
    case Geometry::pm: return "+-";
    case Geometry::mp: return "-+";
  }
  return "?";
}

std::optional<Geometry> parse_geometry(std::string_view text) {
  if (text == "++" || text == "pp") return Geometry::pp;
  if (text == "--" || text == "mm") return Geometry::mm;
  if (text == "+-" || text == "pm") return Geometry::pm;
  if (text == "-+" || text == "mp") return Geometry::mp;
  return std::nullopt;
}

double DetectorConfig::resolved_delta_t1(const SystemParams& params) const {
  return delta_t1.value_or(1.0 / params.gamma);
}

void validate_detectors(const DetectorConfig& config) {
  if (!std::isfinite(config.x1) || !std::isfinite(config.x2) || config.x1 == 0.0 ||
      config.x2 == 0.0) {
    throw ConfigError("detectors: positions must be finite and nonzero");
  }
  if (!(std::abs(config.x2) > std::abs(config.x1))) {
    throw ConfigError("detectors: the second detector must be farther from the qubit (|x2| > |x1|)");
  }
  if (!(config.delta_T >= 0.0) || !std::isfinite(config.delta_T)) {
    throw ConfigError("detectors: delta_T must be non-negative");
  }
  if (config.delta_t1 && !(*config.delta_t1 >= 0.0)) {
    throw ConfigError("detectors: delta_t1 must be non-negative");
  }
}

Geometry geometry_of(const DetectorConfig& config) {
  validate_detectors(config);
  const bool first = config.x1 > 0.0;
  const bool second = config.x2 > 0.0;
  if (first && second) return Geometry::pp;
  if (!first && !second) return Geometry::mm;
  return first ? Geometry::pm : Geometry::mp;
}

std::pair<double, double> detection_times(const DetectorConfig& config,
                                          const SystemParams& params) {
  validate_detectors(config);
  const double offset = config.x1 < 0.0 ? config.resolved_delta_t1(params) : 0.0;
  const double t1 = std::abs(config.x1) / params.v_g + offset;
  const double t2 = std::abs(config.x2) / params.v_g + offset + config.delta_T;
  return {t1, t2};
}

G2Amplitudes g2_amplitudes(const DetectorConfig& config, double omega0,
                           const SystemParams& params) {
  if (!(omega0 > 0.0)) throw DomainError("g2: omega0 must be positive");
  const Geometry geometry = geometry_of(config);
  const double gamma = params.gamma;
  const double detuning = omega0 - params.omega_q;
  const cplx den{detuning, gamma};
  const cplx decay = retarded_decay(detuning, gamma, config.delta_T);
  const cplx rise = one_minus_retarded_decay(detuning, gamma, config.delta_T);

  // Rabi-split response of the excited atom between the light cone and the
  // delayed first click at x1 < 0.
  auto rabi_response = [&] {
    const double dt1 = config.resolved_delta_t1(params);
    const double beta = params.rabi_shift();
    const cplx e1 = retarded_decay(detuning, gamma, dt1);
    return (std::exp(-kI * (beta * dt1)) - e1) / cplx{detuning + beta, gamma} +
           (std::exp(kI * (beta * dt1)) - e1) / cplx{detuning - beta, gamma};
  };

  G2Amplitudes amp{};
  const double g0 = coupling_g(omega0, params);
  amp.prefactor = 2.0 * kPi * g0 * g0 / gamma;
  switch (geometry) {
    case Geometry::pp:
      amp.path1 = 1.0 - kI * gamma * rise / den;
      amp.path2 = decay;
      break;
    case Geometry::mm:
      amp.path1 = gamma * rise / den;
      amp.path2 = -0.5 * gamma * rabi_response() * decay;
      break;
    case Geometry::pm:
      amp.path1 = kI * gamma * rise / den;
      amp.path2 = -decay;
      break;
    case Geometry::mp: {
      const double dt1 = config.resolved_delta_t1(params);
      amp.path1 = 1.0 - kI * gamma * rise / den;
      amp.path2 = kI * decay * std::exp(-kI * (omega0 * dt1)) * (0.5 * gamma) * rabi_response();
      break;
    }
  }
  return amp;
}

G2Decomposition g2(const DetectorConfig& config, double omega0, const SystemParams& params) {
  const G2Amplitudes amp = g2_amplitudes(config, omega0, params);
  G2Decomposition out;
  out.geometry = geometry_of(config);
  out.delta_T = config.delta_T;
  out.delta_t1 = out.geometry == Geometry::mm || out.geometry == Geometry::mp
                     ? config.resolved_delta_t1(params)
                     : 0.0;
  out.path1 = amp.prefactor * std::norm(amp.path1);
  out.path2 = amp.prefactor * std::norm(amp.path2);
  out.interference = amp.prefactor * 2.0 * std::real(amp.path1 * std::conj(amp.path2));
  out.full = amp.prefactor * std::norm(amp.path1 + amp.path2);
  return out;
}

std::vector<G2Decomposition> g2_sweep(const DetectorConfig& config_template,
                                      std::span<const double> delta_T_grid, double omega0,
                                      const SystemParams& params) {
  for (std::size_t i = 1; i < delta_T_grid.size(); ++i) {
    if (!(delta_T_grid[i] >= delta_T_grid[i - 1])) {
      throw ConfigError("g2_sweep: delta_T grid must be non-decreasing");
    }
  }
  std::vector<G2Decomposition> out;
  out.reserve(delta_T_grid.size());
  DetectorConfig config = config_template;
  for (double dT : delta_T_grid) {
    config.delta_T = dT;
    out.push_back(g2(config, omega0, params));
  }
  return out;
}

}  // namespace wgqed
