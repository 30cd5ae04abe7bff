#pragma once

// Physical parameters, unit conventions, couplings and incident pulse spectra
// for a single two-level emitter coupled to an open one-dimensional waveguide.
//
// Reduced units: hbar = 1, dipole moment d = 1. Field amplitudes are in units
// of hbar*Gamma/d. Frequencies and times may be expressed in any unit as long
// as they are consistent; the CLI uses Gamma = 1.

#include <complex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace wgqed {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

enum class CouplingProfile {
  resonance,  // g(omega) = g(Omega) for every mode (default)
  physical,   // g(omega) = g(Omega) * sqrt(omega / Omega)
};

struct SystemParams {
  double omega_q = 50.0;     // qubit transition frequency Omega
  double gamma = 1.0;        // decay rate Gamma
  double lambda_rabi = 1.0;  // Rabi parameter Lambda; splitting is 2*sqrt(Lambda)
  double v_g = 1.0;          // group velocity
  double delta_pw = 5.0;     // plane-wave packet width Delta
  CouplingProfile profile = CouplingProfile::resonance;

  double rabi_shift() const;  // 2*sqrt(Lambda)
};

enum class Severity { warning, error };

struct ValidationIssue {
  Severity severity;
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const;  // no hard errors
  bool has_warnings() const;
  std::string summary() const;
};

/// Checks every parameter invariant. Non-positive rates or frequencies are
/// hard errors; Gamma/Omega > 0.1 is reported as a Markov-validity warning.
ValidationReport validate_params(const SystemParams& params);

/// Throws ConfigError listing every hard error in the report.
void require_valid(const SystemParams& params);

/// Coupling amplitude g(omega). 2*pi*g(Omega)^2 = Gamma in both profiles.
double coupling_g(double omega, const SystemParams& params);

// Incident single-photon spectra.

struct PlaneWave {
  double omega0;
};

/// f(omega) = amplitude * (pi sigma^2)^(-1/4) exp(-(omega - omega0)^2 / (2 sigma^2))
struct GaussianPulse {
  double omega0;
  double sigma;
  double amplitude = 1.0;
};

/// Piecewise-linear amplitude on a strictly increasing grid, zero outside.
struct TabulatedPulse {
  std::vector<double> grid;
  std::vector<cplx> values;
};

using PulseSpectrum = std::variant<PlaneWave, GaussianPulse, TabulatedPulse>;

void validate_pulse(const PulseSpectrum& f);

bool is_plane_wave(const PulseSpectrum& f);

/// Carrier frequency: omega0 for PlaneWave/Gaussian, |f|^2-weighted mean for
/// a table.
double carrier_frequency(const PulseSpectrum& f);

/// Integral of |f|^2. Analytic for Gaussian, trapezoid for tables. Throws
/// DomainError for PlaneWave, which carries no amplitude table.
double pulse_norm(const PulseSpectrum& f);

/// Returns a spectrum with unit L2 norm. PlaneWave passes through unchanged.
PulseSpectrum normalize_pulse(const PulseSpectrum& f);

/// f(omega). Throws DomainError for PlaneWave.
cplx pulse_amplitude(const PulseSpectrum& f, double omega);

/// Frequency interval outside which |f| is negligible (Gaussian: 12 sigma).
std::pair<double, double> pulse_support(const PulseSpectrum& f);

/// Narrowest spectral feature of the pulse (sigma, or the finest table step).
double pulse_feature_scale(const PulseSpectrum& f);

/// Detector position and time. The qubit sits at x = 0, which is rejected.
class SpaceTimePoint {
 public:
  SpaceTimePoint(double x, double t);

  double x() const { return x_; }
  double t() const { return t_; }
  bool forward() const { return x_ > 0.0; }

  /// t - |x| / v_g
  double retarded_time(double v_g) const;

 private:
  double x_;
  double t_;
};

}  // namespace wgqed
