#pragma once

// First- and second-order photon correlation functions assembled from the
// closed-form matrix elements.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wgqed/matrix_elements.hpp"
#include "wgqed/model.hpp"

namespace wgqed {

struct G1Channel {
  std::string name;
  double value;
};

struct G1Result {
  double value = 0.0;
  SpaceTimePoint point;
  std::vector<G1Channel> breakdown;
};

/// Gamma^2 exp(-2 Gamma tau) theta(tau); single "spont" channel.
G1Result g1_spontaneous(const SpaceTimePoint& pt, const SystemParams& params);

/// |<g,0|E+|g,1_f>|^2, raw units (incident plane-wave density is g^2 Delta).
G1Result g1_pulse(const SpaceTimePoint& pt, const PulseSpectrum& f, const SystemParams& params,
                  const SpectralIntegration& quad = {});

/// g(omega0)^2 Delta: the free-field density of a plane wave.
double plane_wave_density(double omega0, const SystemParams& params);

/// Two-excitation first-order correlation for an incident plane wave in the
/// quasi-stationary regime (transients exp(-Gamma tau) dropped, Rabi
/// oscillations exp(+-i 2 sqrt(Lambda) tau) kept), normalized by the incident
/// density g(omega0)^2 Delta. Channels: "e0" (atom left excited) and "photon"
/// (atom relaxed, one photon remains in the waveguide).
G1Result g1_two_excitation(const SpaceTimePoint& pt, double omega0, const SystemParams& params);

enum class Side { positive, negative };

/// Time-averaged two-excitation spectrum:
///   x > 0: 1 + (5/16)(L+ + L-),   x < 0: (5/16)(L+ + L-),
/// with L+- unit-height Lorentzians of width Gamma centred at Omega -+ 2 sqrt(Lambda).
double g1_av_spectrum(double omega0, Side side, const SystemParams& params);

/// Numerical average of g1_two_excitation over one full oscillation period
/// pi / sqrt(Lambda) using `samples` midpoint samples. Requires Lambda > 0.
double g1_av_numeric(double omega0, Side side, const SystemParams& params, int samples = 512);

enum class Geometry { pp, mm, pm, mp };  // (sign x1, sign x2)

std::string_view to_string(Geometry geometry);
std::optional<Geometry> parse_geometry(std::string_view text);

struct DetectorConfig {
  double x1 = 1.0;
  double x2 = 2.0;
  double delta_T = 0.0;
  std::optional<double> delta_t1;  // defaults to 1/Gamma

  double resolved_delta_t1(const SystemParams& params) const;
};

/// Throws ConfigError unless |x2| > |x1| > 0 and delta_T, delta_t1 >= 0.
void validate_detectors(const DetectorConfig& config);

Geometry geometry_of(const DetectorConfig& config);

/// Detection times of the first and second click. The first click sits on the
/// light cone of x1, delayed by delta_t1 when x1 < 0; the second click follows
/// at retarded delay delta_T.
std::pair<double, double> detection_times(const DetectorConfig& config, const SystemParams& params);

/// Normalized amplitudes of the two detection pathways, g2 = prefactor |A1 + A2|^2.
/// path1: the first click leaves |g,1> (ground atom, one photon in flight).
/// path2: the first click leaves |e,0> (excited atom, empty waveguide).
struct G2Amplitudes {
  cplx path1;
  cplx path2;
  double prefactor;  // 2 pi g(omega0)^2 / Gamma; 1 in the resonance profile
};

G2Amplitudes g2_amplitudes(const DetectorConfig& config, double omega0, const SystemParams& params);

struct G2Decomposition {
  double path1 = 0.0;
  double path2 = 0.0;
  double interference = 0.0;
  double full = 0.0;
  Geometry geometry = Geometry::pp;
  double delta_T = 0.0;
  double delta_t1 = 0.0;
};

/// Normalized g2 = G2 * 2 pi / (Delta Gamma^3) for an incident plane wave.
G2Decomposition g2(const DetectorConfig& config, double omega0, const SystemParams& params);

/// One decomposition per delta_T. The grid must be non-decreasing.
std::vector<G2Decomposition> g2_sweep(const DetectorConfig& config_template,
                                      std::span<const double> delta_T_grid, double omega0,
                                      const SystemParams& params);

}  // namespace wgqed
