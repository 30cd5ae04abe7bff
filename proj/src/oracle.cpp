#include "wgqed/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "wgqed/error.hpp"

namespace wgqed::oracle {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kStepBound = 0.1;

double sum_norm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return s;
}

// out = -i H in, one-excitation sector, rotating frame.
void derivative(const ModeGrid& grid, const std::vector<cplx>& in, std::vector<cplx>& out) {
  const std::size_t n = grid.n_modes;
  const cplx* a = in.data() + 1;
  const cplx* b = in.data() + 1 + n;
  cplx* oa = out.data() + 1;
  cplx* ob = out.data() + 1 + n;
  const cplx e = in[0];
  cplx acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += grid.coupling[k] * (a[k] + b[k]);
  out[0] = -kI * acc;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = grid.detuning[k];
    const double g = grid.coupling[k];
    oa[k] = -kI * (u * a[k] + g * e);
    ob[k] = -kI * (u * b[k] + g * e);
  }
}

// out = -i H in, two-excitation sector, rotating frame (energies relative to 2 Omega).
// Every output amplitude is a gather over its own inputs, so the result does
// not depend on the thread count.
void derivative(const ModeGrid& grid, const TwoExcState& shape, const std::vector<cplx>& in,
                std::vector<cplx>& out) {
  const std::size_t n = grid.n_modes;
  const std::size_t pairs = shape.pair_count();
  const cplx* ea = in.data();
  const cplx* eb = ea + n;
  const cplx* aa = eb + n;
  const cplx* bb = aa + pairs;
  const cplx* ab = bb + pairs;
  cplx* oea = out.data();
  cplx* oeb = oea + n;
  cplx* oaa = oeb + n;
  cplx* obb = oaa + pairs;
  cplx* oab = obb + pairs;
  const double* u = grid.detuning.data();
  const double* g = grid.coupling.data();

  auto pidx = [&](std::size_t k, std::size_t q) { return shape.pair_index(k, q); };

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ps = 0; ps < static_cast<std::ptrdiff_t>(n); ++ps) {
    const auto p = static_cast<std::size_t>(ps);
    cplx sa = u[p] * ea[p];
    cplx sb = u[p] * eb[p];
    for (std::size_t m = 0; m < n; ++m) {
      const double w = m == p ? kSqrt2 * g[m] : g[m];
      const std::size_t idx = m < p ? pidx(m, p) : pidx(p, m);
      sa += w * aa[idx];
      sb += w * bb[idx];
      sa += g[m] * ab[p * n + m];
      sb += g[m] * ab[m * n + p];
    }
    oea[p] = -kI * sa;
    oeb[p] = -kI * sb;
  }

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ks = 0; ks < static_cast<std::ptrdiff_t>(n); ++ks) {
    const auto k = static_cast<std::size_t>(ks);
    const std::size_t row = pidx(k, k);
    oaa[row] = -kI * (2.0 * u[k] * aa[row] + kSqrt2 * g[k] * ea[k]);
    obb[row] = -kI * (2.0 * u[k] * bb[row] + kSqrt2 * g[k] * eb[k]);
    for (std::size_t q = k + 1; q < n; ++q) {
      const std::size_t idx = row + (q - k);
      const double energy = u[k] + u[q];
      oaa[idx] = -kI * (energy * aa[idx] + g[q] * ea[k] + g[k] * ea[q]);
      obb[idx] = -kI * (energy * bb[idx] + g[q] * eb[k] + g[k] * eb[q]);
    }
    for (std::size_t q = 0; q < n; ++q) {
      const std::size_t idx = k * n + q;
      oab[idx] = -kI * ((u[k] + u[q]) * ab[idx] + g[q] * ea[k] + g[k] * eb[q]);
    }
  }
}

// Classical RK4 on a flat amplitude vector.
template <class Deriv>
class Rk4 {
 public:
  Rk4(std::size_t dim, Deriv deriv) : deriv_(std::move(deriv)), k_(dim), tmp_(dim), acc_(dim) {}

  void step(std::vector<cplx>& y, double dt) {
    const std::size_t dim = y.size();
    const double h2 = 0.5 * dt;
    const double w1 = dt / 6.0;
    const double w2 = dt / 3.0;
    deriv_(y, k_);
    for (std::size_t i = 0; i < dim; ++i) {
      acc_[i] = y[i] + w1 * k_[i];
      tmp_[i] = y[i] + h2 * k_[i];
    }
    deriv_(tmp_, k_);
    for (std::size_t i = 0; i < dim; ++i) {
      acc_[i] += w2 * k_[i];
      tmp_[i] = y[i] + h2 * k_[i];
    }
    deriv_(tmp_, k_);
    for (std::size_t i = 0; i < dim; ++i) {
      acc_[i] += w2 * k_[i];
      tmp_[i] = y[i] + dt * k_[i];
    }
    deriv_(tmp_, k_);
    for (std::size_t i = 0; i < dim; ++i) y[i] = acc_[i] + w1 * k_[i];
  }

 private:
  Deriv deriv_;
  std::vector<cplx> k_;
  std::vector<cplx> tmp_;
  std::vector<cplx> acc_;
};

template <class State, class Deriv>
Trajectory<State> run(const State& initial, const ModeGrid& grid, const EvolutionPlan& plan,
                      Deriv deriv) {
  check_plan(grid, plan, initial.t);
  Trajectory<State> out;
  State state = initial;
  out.snapshots.push_back(state);
  const double span = plan.t_end - initial.t;
  const auto steps = span > 0.0 ? static_cast<std::size_t>(std::llround(span / plan.dt)) : 0;
  Rk4<Deriv> rk(state.data().size(), std::move(deriv));
  for (std::size_t s = 1; s <= steps; ++s) {
    rk.step(state.data(), plan.dt);
    state.t = initial.t + span * static_cast<double>(s) / static_cast<double>(steps);
    if (plan.snapshot_every > 0 && s % plan.snapshot_every == 0 && s != steps) {
      out.snapshots.push_back(state);
    }
  }
  state.t = plan.t_end;
  if (steps > 0) out.snapshots.push_back(state);
  return out;
}

struct Branches {
  bool forward;
  bool backward;
};

Branches select(FieldBranch branch, double x) {
  switch (branch) {
    case FieldBranch::both: return {true, true};
    case FieldBranch::forward: return {true, false};
    case FieldBranch::backward: return {false, true};
    case FieldBranch::outgoing: return {x > 0.0, x < 0.0};
  }
  return {true, true};
}

std::vector<cplx> spatial_phases(const ModeGrid& grid, double x) {
  std::vector<cplx> phase(grid.n_modes);
  for (std::size_t k = 0; k < grid.n_modes; ++k) {
    phase[k] = std::exp(kI * (grid.omega[k] * x / grid.params.v_g));
  }
  return phase;
}

cplx frame_phase(const ModeGrid& grid, double t) {
  return std::exp(-kI * (grid.params.omega_q * t));
}

void require_nonzero(double x) {
  if (!std::isfinite(x) || x == 0.0) throw DomainError("detector position must be nonzero");
}

}  // namespace

double ModeGrid::lambda_grid() const {
  double s = 0.0;
  for (double g : coupling) s += g * g;
  return 2.0 * s;
}

double ModeGrid::max_detuning() const {
  double m = 0.0;
  for (double u : detuning) m = std::max(m, std::abs(u));
  return m;
}

double ModeGrid::recurrence_time() const { return 2.0 * kPi / d_omega; }

double ModeGrid::guard_time() const { return 0.5 * recurrence_time(); }

std::size_t ModeGrid::nearest_mode(double w) const {
  const double k = std::round((w - omega_min) / d_omega);
  const double clamped = std::clamp(k, 0.0, static_cast<double>(n_modes - 1));
  return static_cast<std::size_t>(clamped);
}

ModeGrid build_grid(const SystemParams& params, std::size_t n_modes, double margin) {
  require_valid(params);
  if (n_modes < 100) throw ConfigError("build_grid: need at least 100 modes per direction");
  if (!(margin >= 20.0 * params.gamma)) {
    throw ConfigError("build_grid: margin around Omega must be at least 20 Gamma");
  }
  if (!(params.omega_q - margin > 0.0)) {
    throw ConfigError("build_grid: band [Omega - margin, Omega + margin] reaches omega <= 0");
  }
  ModeGrid grid;
  grid.params = params;
  grid.n_modes = n_modes;
  grid.d_omega = 2.0 * margin / static_cast<double>(n_modes);
  grid.omega.resize(n_modes);
  grid.detuning.resize(n_modes);
  grid.coupling.resize(n_modes);
  for (std::size_t k = 0; k < n_modes; ++k) {
    const double w = params.omega_q - margin + static_cast<double>(k) * grid.d_omega;
    grid.omega[k] = w;
    grid.detuning[k] = w - params.omega_q;
    grid.coupling[k] = coupling_g(w, params) * std::sqrt(grid.d_omega);
  }
  grid.omega_min = grid.omega.front();
  grid.omega_max = grid.omega.back();
  if (grid.d_omega > 0.1 * params.gamma) {
    std::ostringstream os;
    os << "mode spacing " << grid.d_omega << " exceeds Gamma/10; the linewidth is under-resolved";
    grid.warnings.push_back(os.str());
  }
  return grid;
}

OneExcState::OneExcState(std::size_t n_modes) : n_(n_modes), amp_(1 + 2 * n_modes) {}

double OneExcState::norm() const { return sum_norm(amp_); }

TwoExcState::TwoExcState(std::size_t n_modes) : n_(n_modes) {
  if (n_modes > max_modes) {
    std::ostringstream os;
    os << "two-excitation sector limited to " << max_modes << " modes per direction (got "
       << n_modes << "); use a smaller N";
    throw ConfigError(os.str());
  }
  amp_.resize(2 * n_ + 2 * pair_count() + n_ * n_);
}

std::size_t TwoExcState::pair_index(std::size_t k, std::size_t q) const {
  return k * (2 * n_ - k + 1) / 2 + (q - k);
}

double TwoExcState::norm() const { return sum_norm(amp_); }

double TwoExcState::excited_population() const {
  double s = 0.0;
  for (const auto& c : ea()) s += std::norm(c);
  for (const auto& c : eb()) s += std::norm(c);
  return s;
}

OneExcState excited_state(const ModeGrid& grid) {
  OneExcState s(grid.n_modes);
  s.excited() = 1.0;
  return s;
}

OneExcState photon_state(const ModeGrid& grid, const PulseSpectrum& f, double x_center) {
  validate_pulse(f);
  OneExcState s(grid.n_modes);
  auto a = s.forward();
  if (const auto* pw = std::get_if<PlaneWave>(&f)) {
    a[grid.nearest_mode(pw->omega0)] = 1.0;
    return s;
  }
  const double root_d = std::sqrt(grid.d_omega);
  for (std::size_t k = 0; k < grid.n_modes; ++k) {
    a[k] = pulse_amplitude(f, grid.omega[k]) * root_d *
           std::exp(-kI * (grid.omega[k] * x_center / grid.params.v_g));
  }
  const double norm = s.norm();
  if (!(norm > 0.0)) throw DomainError("photon_state: pulse has no weight on the mode grid");
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& c : a) c *= scale;
  return s;
}

TwoExcState excited_plus_photon(const ModeGrid& grid, const PulseSpectrum& f) {
  const OneExcState photon = photon_state(grid, f);
  TwoExcState s(grid.n_modes);
  std::copy(photon.forward().begin(), photon.forward().end(), s.ea().begin());
  return s;
}

EvolutionPlan make_plan(const ModeGrid& grid, double t_start, double t_end, double safety,
                        std::size_t snapshot_every) {
  if (!(t_end >= t_start)) throw PlanError("make_plan: t_end precedes the current time");
  EvolutionPlan plan;
  plan.t_end = t_end;
  plan.snapshot_every = snapshot_every;
  const double dt_max = safety / std::max(grid.max_detuning(), 1e-300);
  const double span = t_end - t_start;
  const double steps = std::max(1.0, std::ceil(span / dt_max));
  plan.dt = span > 0.0 ? span / steps : dt_max;
  return plan;
}

void check_plan(const ModeGrid& grid, const EvolutionPlan& plan, double t_start) {
  if (!(plan.t_end >= t_start)) throw PlanError("evolution plan ends before the state time");
  if (!(plan.dt > 0.0)) throw PlanError("evolution plan needs dt > 0");
  if (plan.dt * grid.max_detuning() > kStepBound) {
    std::ostringstream os;
    os << "dt * max|omega_k - Omega| = " << plan.dt * grid.max_detuning() << " exceeds "
       << kStepBound;
    throw PlanError(os.str());
  }
  const double span = plan.t_end - t_start;
  const double steps = span / plan.dt;
  if (span > 0.0 && std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps)) {
    throw PlanError("evolution plan: dt must divide the time span");
  }
}

Trajectory<OneExcState> evolve_one_exc(const OneExcState& initial, const ModeGrid& grid,
                                       const EvolutionPlan& plan) {
  if (initial.n_modes() != grid.n_modes) throw ConfigError("state does not match the grid");
  auto deriv = [&grid](const std::vector<cplx>& in, std::vector<cplx>& out) {
    derivative(grid, in, out);
  };
  return run(initial, grid, plan, deriv);
}

Trajectory<TwoExcState> evolve_two_exc(const TwoExcState& initial, const ModeGrid& grid,
                                       const EvolutionPlan& plan) {
  if (initial.n_modes() != grid.n_modes) throw ConfigError("state does not match the grid");
  auto deriv = [&grid, &initial](const std::vector<cplx>& in, std::vector<cplx>& out) {
    derivative(grid, initial, in, out);
  };
  return run(initial, grid, plan, deriv);
}

void propagate(OneExcState& state, const ModeGrid& grid, double t_end) {
  if (t_end == state.t) return;
  state = evolve_one_exc(state, grid, make_plan(grid, state.t, t_end)).snapshots.back();
}

void propagate(TwoExcState& state, const ModeGrid& grid, double t_end) {
  if (t_end == state.t) return;
  state = evolve_two_exc(state, grid, make_plan(grid, state.t, t_end)).snapshots.back();
}

cplx apply_Eplus(const OneExcState& state, double x, const ModeGrid& grid, FieldBranch branch) {
  require_nonzero(x);
  const auto [fwd, bwd] = select(branch, x);
  const auto phase = spatial_phases(grid, x);
  const auto a = state.forward();
  const auto b = state.backward();
  cplx acc = 0.0;
  for (std::size_t k = 0; k < grid.n_modes; ++k) {
    if (fwd) acc += grid.coupling[k] * phase[k] * a[k];
    if (bwd) acc += grid.coupling[k] * std::conj(phase[k]) * b[k];
  }
  return kI * acc * frame_phase(grid, state.t);
}

OneExcState apply_Eplus(const TwoExcState& state, double x, const ModeGrid& grid,
                        FieldBranch branch) {
  require_nonzero(x);
  const std::size_t n = grid.n_modes;
  const auto [fwd, bwd] = select(branch, x);
  const auto phase = spatial_phases(grid, x);
  std::vector<cplx> ga(n);
  std::vector<cplx> gb(n);
  for (std::size_t k = 0; k < n; ++k) {
    ga[k] = fwd ? grid.coupling[k] * phase[k] : 0.0;
    gb[k] = bwd ? grid.coupling[k] * std::conj(phase[k]) : 0.0;
  }
  const auto ea = state.ea();
  const auto eb = state.eb();
  const auto aa = state.aa();
  const auto bb = state.bb();
  const auto ab = state.ab();
  const cplx global = kI * frame_phase(grid, state.t);

  OneExcState out(n);
  out.t = state.t;
  cplx e = 0.0;
  for (std::size_t k = 0; k < n; ++k) e += ga[k] * ea[k] + gb[k] * eb[k];
  out.excited() = global * e;

  auto oa = out.forward();
  auto ob = out.backward();
  for (std::size_t p = 0; p < n; ++p) {
    cplx sa = 0.0;
    cplx sb = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const double w = m == p ? kSqrt2 : 1.0;
      const std::size_t idx = m < p ? state.pair_index(m, p) : state.pair_index(p, m);
      sa += w * ga[m] * aa[idx] + gb[m] * ab[p * n + m];
      sb += w * gb[m] * bb[idx] + ga[m] * ab[m * n + p];
    }
    oa[p] = global * sa;
    ob[p] = global * sb;
  }
  return out;
}

OracleValue oracle_g1(const OneExcState& initial, double x, double t, const ModeGrid& grid,
                      FieldBranch branch) {
  OneExcState s = initial;
  propagate(s, grid, t);
  return {std::norm(apply_Eplus(s, x, grid, branch)), t > grid.guard_time()};
}

OracleValue oracle_g1(const TwoExcState& initial, double x, double t, const ModeGrid& grid,
                      FieldBranch branch) {
  TwoExcState s = initial;
  propagate(s, grid, t);
  return {apply_Eplus(s, x, grid, branch).norm(), t > grid.guard_time()};
}

std::vector<OracleValue> oracle_g1_series(const OneExcState& initial,
                                          std::span<const SpaceTime> samples,
                                          const ModeGrid& grid, FieldBranch branch) {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].t < samples[i - 1].t) {
      throw ConfigError("oracle_g1_series: samples must be ordered in time");
    }
  }
  std::vector<OracleValue> out;
  out.reserve(samples.size());
  OneExcState s = initial;
  for (const auto& sample : samples) {
    propagate(s, grid, sample.t);
    out.push_back({std::norm(apply_Eplus(s, sample.x, grid, branch)), sample.t > grid.guard_time()});
  }
  return out;
}

double free_field_density(const OneExcState& photon, double x, double t, const ModeGrid& grid,
                          FieldBranch branch) {
  OneExcState s = photon;
  const double span = t - photon.t;
  auto a = s.forward();
  auto b = s.backward();
  for (std::size_t k = 0; k < grid.n_modes; ++k) {
    const cplx rot = std::exp(-kI * (grid.detuning[k] * span));
    a[k] *= rot;
    b[k] *= rot;
  }
  s.excited() = 0.0;
  s.t = t;
  return std::norm(apply_Eplus(s, x, grid, branch));
}

std::vector<OracleG2Point> oracle_g2_sweep(const TwoExcState& initial,
                                           const DetectorConfig& config,
                                           std::span<const double> delta_T_grid,
                                           const ModeGrid& grid, const OracleG2Options& options) {
  validate_detectors(config);
  for (std::size_t i = 1; i < delta_T_grid.size(); ++i) {
    if (!(delta_T_grid[i] >= delta_T_grid[i - 1])) {
      throw ConfigError("oracle_g2_sweep: delta_T grid must be non-decreasing");
    }
  }
  std::vector<OracleG2Point> out;
  if (delta_T_grid.empty()) return out;

  DetectorConfig probe = config;
  probe.delta_T = 0.0;
  const double t1 = detection_times(probe, grid.params).first + options.first_click_delay;

  TwoExcState psi = initial;
  propagate(psi, grid, t1);
  OneExcState collapsed = apply_Eplus(psi, config.x1, grid, options.branch);

  // Projection of the collapsed state on U(t1)|e,0>: the amplitude of the
  // pathway whose intermediate state (at t = 0) is the excited atom.
  OneExcState reference = excited_state(grid);
  propagate(reference, grid, t1);
  cplx overlap = 0.0;
  for (std::size_t i = 0; i < collapsed.data().size(); ++i) {
    overlap += std::conj(reference.data()[i]) * collapsed.data()[i];
  }

  for (double dT : delta_T_grid) {
    DetectorConfig c = config;
    c.delta_T = dT;
    const double t2 = detection_times(c, grid.params).second + options.first_click_delay;
    propagate(collapsed, grid, t2);
    propagate(reference, grid, t2);
    OracleG2Point p;
    p.delta_T = dT;
    p.t1 = t1;
    p.t2 = t2;
    const cplx total = apply_Eplus(collapsed, config.x2, grid, options.branch);
    p.path2 = overlap * apply_Eplus(reference, config.x2, grid, options.branch);
    p.path1 = total - p.path2;
    p.full = std::norm(total);
    p.guard_violated = t2 > grid.guard_time();
    out.push_back(p);
  }
  return out;
}

OracleG2Point oracle_g2(const TwoExcState& initial, const DetectorConfig& config,
                        const ModeGrid& grid, const OracleG2Options& options) {
  const double dT = config.delta_T;
  return oracle_g2_sweep(initial, config, std::span<const double>(&dT, 1), grid, options).front();
}

}  // namespace wgqed::oracle
