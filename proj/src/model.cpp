#include "wgqed/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wgqed/error.hpp"

namespace wgqed {

namespace {

constexpr double kMarkovThreshold = 0.1;
constexpr double kGaussianSupportSigmas = 12.0;

void check_positive(ValidationReport& report, const char* field, double value) {
  if (!std::isfinite(value) || value <= 0.0) {
    std::ostringstream os;
    os << "must be positive and finite, got " << value;
    report.issues.push_back({Severity::error, field, os.str()});
  }
}

double gaussian_prefactor(const GaussianPulse& g) {
  return g.amplitude / std::pow(kPi * g.sigma * g.sigma, 0.25);
}

}  // namespace

double SystemParams::rabi_shift() const { return 2.0 * std::sqrt(lambda_rabi); }

bool ValidationReport::ok() const {
  return std::none_of(issues.begin(), issues.end(),
                      [](const ValidationIssue& i) { return i.severity == Severity::error; });
}

bool ValidationReport::has_warnings() const {
  return std::any_of(issues.begin(), issues.end(),
                     [](const ValidationIssue& i) { return i.severity == Severity::warning; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& issue : issues) {
    os << (issue.severity == Severity::error ? "error: " : "warning: ") << issue.field
       << ": " << issue.message << "\n";
  }
  return os.str();
}

ValidationReport validate_params(const SystemParams& params) {
  ValidationReport report;
  check_positive(report, "omega_q", params.omega_q);
  check_positive(report, "gamma", params.gamma);
  check_positive(report, "v_g", params.v_g);
  check_positive(report, "delta_pw", params.delta_pw);
  if (!std::isfinite(params.lambda_rabi) || params.lambda_rabi < 0.0) {
    report.issues.push_back(
        {Severity::error, "lambda_rabi", "must be non-negative and finite"});
  }
  if (params.gamma > 0.0 && params.omega_q > 0.0 &&
      params.gamma / params.omega_q > kMarkovThreshold) {
    std::ostringstream os;
    os << "gamma/omega_q = " << params.gamma / params.omega_q
       << " exceeds " << kMarkovThreshold << "; Markov approximation is questionable";
    report.issues.push_back({Severity::warning, "gamma", os.str()});
  }
  return report;
}

void require_valid(const SystemParams& params) {
  const auto report = validate_params(params);
  if (!report.ok()) throw ConfigError("invalid system parameters:\n" + report.summary());
}

double coupling_g(double omega, const SystemParams& params) {
  if (!(omega > 0.0)) throw DomainError("coupling_g: frequency must be positive");
  const double g_res = std::sqrt(params.gamma / (2.0 * kPi));
  if (params.profile == CouplingProfile::resonance) return g_res;
  return g_res * std::sqrt(omega / params.omega_q);
}

void validate_pulse(const PulseSpectrum& f) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PlaneWave>) {
          if (!(p.omega0 > 0.0)) throw ConfigError("plane wave: omega0 must be positive");
        } else if constexpr (std::is_same_v<T, GaussianPulse>) {
          if (!(p.omega0 > 0.0)) throw ConfigError("gaussian pulse: omega0 must be positive");
          if (!(p.sigma > 0.0)) throw ConfigError("gaussian pulse: sigma must be positive");
        } else {
          if (p.grid.size() < 2 || p.grid.size() != p.values.size()) {
            throw ConfigError("tabulated pulse: need >= 2 points and matching value count");
          }
          for (std::size_t i = 1; i < p.grid.size(); ++i) {
            if (!(p.grid[i] > p.grid[i - 1])) {
              throw ConfigError("tabulated pulse: grid must be strictly increasing");
            }
          }
          if (!(p.grid.front() > 0.0)) {
            throw ConfigError("tabulated pulse: frequencies must be positive");
          }
        }
      },
      f);
}

bool is_plane_wave(const PulseSpectrum& f) { return std::holds_alternative<PlaneWave>(f); }

double carrier_frequency(const PulseSpectrum& f) {
  if (const auto* pw = std::get_if<PlaneWave>(&f)) return pw->omega0;
  if (const auto* g = std::get_if<GaussianPulse>(&f)) return g->omega0;
  const auto& tab = std::get<TabulatedPulse>(f);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 1; i < tab.grid.size(); ++i) {
    const double h = tab.grid[i] - tab.grid[i - 1];
    const double w0 = std::norm(tab.values[i - 1]);
    const double w1 = std::norm(tab.values[i]);
    num += 0.5 * h * (w0 * tab.grid[i - 1] + w1 * tab.grid[i]);
    den += 0.5 * h * (w0 + w1);
  }
  if (den <= 0.0) throw DomainError("tabulated pulse has zero norm");
  return num / den;
}

double pulse_norm(const PulseSpectrum& f) {
  if (is_plane_wave(f)) throw DomainError("plane wave carries no amplitude table");
  if (const auto* g = std::get_if<GaussianPulse>(&f)) return g->amplitude * g->amplitude;
  const auto& tab = std::get<TabulatedPulse>(f);
  double sum = 0.0;
  for (std::size_t i = 1; i < tab.grid.size(); ++i) {
    sum += 0.5 * (tab.grid[i] - tab.grid[i - 1]) *
           (std::norm(tab.values[i - 1]) + std::norm(tab.values[i]));
  }
  return sum;
}

PulseSpectrum normalize_pulse(const PulseSpectrum& f) {
  validate_pulse(f);
  if (is_plane_wave(f)) return f;
  const double norm = pulse_norm(f);
  if (!(norm > 0.0)) throw DomainError("degenerate pulse: zero L2 norm");
  if (auto g = std::get_if<GaussianPulse>(&f)) {
    GaussianPulse out = *g;
    out.amplitude = 1.0;
    return out;
  }
  TabulatedPulse out = std::get<TabulatedPulse>(f);
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& v : out.values) v *= scale;
  return out;
}

cplx pulse_amplitude(const PulseSpectrum& f, double omega) {
  if (is_plane_wave(f)) throw DomainError("plane wave has no pointwise amplitude");
  if (const auto* g = std::get_if<GaussianPulse>(&f)) {
    const double u = (omega - g->omega0) / g->sigma;
    return gaussian_prefactor(*g) * std::exp(-0.5 * u * u);
  }
  const auto& tab = std::get<TabulatedPulse>(f);
  if (omega < tab.grid.front() || omega > tab.grid.back()) return 0.0;
  auto it = std::upper_bound(tab.grid.begin(), tab.grid.end(), omega);
  if (it == tab.grid.end()) return tab.values.back();
  const auto i = static_cast<std::size_t>(it - tab.grid.begin());
  const double w = (omega - tab.grid[i - 1]) / (tab.grid[i] - tab.grid[i - 1]);
  return (1.0 - w) * tab.values[i - 1] + w * tab.values[i];
}

std::pair<double, double> pulse_support(const PulseSpectrum& f) {
  if (const auto* pw = std::get_if<PlaneWave>(&f)) return {pw->omega0, pw->omega0};
  if (const auto* g = std::get_if<GaussianPulse>(&f)) {
    return {g->omega0 - kGaussianSupportSigmas * g->sigma,
            g->omega0 + kGaussianSupportSigmas * g->sigma};
  }
  const auto& tab = std::get<TabulatedPulse>(f);
  return {tab.grid.front(), tab.grid.back()};
}

double pulse_feature_scale(const PulseSpectrum& f) {
  if (is_plane_wave(f)) return 0.0;
  if (const auto* g = std::get_if<GaussianPulse>(&f)) return g->sigma;
  const auto& tab = std::get<TabulatedPulse>(f);
  double h = tab.grid.back() - tab.grid.front();
  for (std::size_t i = 1; i < tab.grid.size(); ++i) h = std::min(h, tab.grid[i] - tab.grid[i - 1]);
  return h;
}

SpaceTimePoint::SpaceTimePoint(double x, double t) : x_(x), t_(t) {
  if (!std::isfinite(x) || x == 0.0) {
    throw DomainError("detector position must be finite and nonzero (qubit sits at x = 0)");
  }
  if (!std::isfinite(t) || t < 0.0) throw DomainError("time must be finite and non-negative");
}

double SpaceTimePoint::retarded_time(double v_g) const { return t_ - std::abs(x_) / v_g; }

}  // namespace wgqed
