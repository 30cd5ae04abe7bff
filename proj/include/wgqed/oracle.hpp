#pragma once

// Brute-force reference: the forward (a) and backward (b) continua are
// replaced by N discrete modes each, and the rotating-wave Hamiltonian
//
//   H = Omega s+s- + sum_k w_k (a_k^+ a_k + b_k^+ b_k)
//       + sum_k g_k (s+ a_k + s+ b_k + h.c.)
//
// is integrated in the one- and two-excitation sectors with a fixed-step RK4
// in the frame rotating at Omega. No closed form from the analytic modules is
// used here.
//
// The discrete spectrum makes the waveguide a ring of circumference
// 2 pi v_g / d_omega: a single occupied mode is an exact plane wave, and
// results are only meaningful before the recurrence time 2 pi / d_omega.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wgqed/correlation.hpp"
#include "wgqed/model.hpp"

namespace wgqed::oracle {

struct ModeGrid {
  SystemParams params;
  double omega_min = 0.0;
  double omega_max = 0.0;
  double d_omega = 0.0;
  std::size_t n_modes = 0;
  std::vector<double> omega;
  std::vector<double> detuning;  // omega_k - Omega
  std::vector<double> coupling;  // g(omega_k) sqrt(d_omega), same for a and b
  std::vector<std::string> warnings;

  /// Sum of g_k^2 over both directions.
  double lambda_grid() const;
  double max_detuning() const;
  double recurrence_time() const;  // 2 pi / d_omega
  double guard_time() const;       // half the recurrence time
  std::size_t nearest_mode(double w) const;
};

/// Modes omega_k = Omega - margin + k d_omega, k = 0..N-1, d_omega = 2 margin / N,
/// so Omega falls on a mode for even N.
///
/// Throws ConfigError for N < 100, margin < 20 Gamma, or a band reaching
/// omega <= 0. A spacing coarser than Gamma/10 is reported in `warnings`.
ModeGrid build_grid(const SystemParams& params, std::size_t n_modes, double margin);

/// Amplitudes in the rotating frame; lab amplitudes carry exp(-i Omega t) per
/// excitation. Layout: [c_e | a_0..a_{N-1} | b_0..b_{N-1}].
class OneExcState {
 public:
  explicit OneExcState(std::size_t n_modes = 0);

  double t = 0.0;

  std::size_t n_modes() const { return n_; }
  cplx& excited() { return amp_[0]; }
  cplx excited() const { return amp_[0]; }
  std::span<cplx> forward() { return {amp_.data() + 1, n_}; }
  std::span<const cplx> forward() const { return {amp_.data() + 1, n_}; }
  std::span<cplx> backward() { return {amp_.data() + 1 + n_, n_}; }
  std::span<const cplx> backward() const { return {amp_.data() + 1 + n_, n_}; }

  std::vector<cplx>& data() { return amp_; }
  const std::vector<cplx>& data() const { return amp_; }
  double norm() const;

 private:
  std::size_t n_;
  std::vector<cplx> amp_;
};

/// Two-excitation sector. Amplitudes refer to normalized Fock states:
///   ea[k], eb[k]   |e, 1_k>
///   aa[(k,q)]      |g, 1_k 1_q> for k < q, |g, 2_k> for k = q (packed, k <= q)
///   bb[(k,q)]      same for the backward branch
///   ab[k*N + q]    |g, 1_k^a 1_q^b>
/// With this convention the norm is the plain sum of |amplitude|^2, and the
/// k = q diagonal couples to |e, 1_k> with strength sqrt(2) g_k.
class TwoExcState {
 public:
  explicit TwoExcState(std::size_t n_modes = 0);

  double t = 0.0;

  static constexpr std::size_t max_modes = 400;

  std::size_t n_modes() const { return n_; }
  std::size_t pair_count() const { return n_ * (n_ + 1) / 2; }
  std::size_t pair_index(std::size_t k, std::size_t q) const;  // requires k <= q

  std::span<cplx> ea() { return block(0, n_); }
  std::span<cplx> eb() { return block(n_, n_); }
  std::span<cplx> aa() { return block(2 * n_, pair_count()); }
  std::span<cplx> bb() { return block(2 * n_ + pair_count(), pair_count()); }
  std::span<cplx> ab() { return block(2 * n_ + 2 * pair_count(), n_ * n_); }
  std::span<const cplx> ea() const { return block(0, n_); }
  std::span<const cplx> eb() const { return block(n_, n_); }
  std::span<const cplx> aa() const { return block(2 * n_, pair_count()); }
  std::span<const cplx> bb() const { return block(2 * n_ + pair_count(), pair_count()); }
  std::span<const cplx> ab() const { return block(2 * n_ + 2 * pair_count(), n_ * n_); }

  std::vector<cplx>& data() { return amp_; }
  const std::vector<cplx>& data() const { return amp_; }
  double norm() const;
  double excited_population() const;

 private:
  std::span<cplx> block(std::size_t offset, std::size_t count) {
    return {amp_.data() + offset, count};
  }
  std::span<const cplx> block(std::size_t offset, std::size_t count) const {
    return {amp_.data() + offset, count};
  }

  std::size_t n_;
  std::vector<cplx> amp_;
};

// Initial states.

OneExcState excited_state(const ModeGrid& grid);

/// Forward-moving photon with amplitudes f(omega_k) sqrt(d_omega), renormalized
/// on the grid. A PlaneWave occupies the single mode nearest omega0. The
/// packet is centred on x_center at t = 0 (x_center < 0: still incoming).
OneExcState photon_state(const ModeGrid& grid, const PulseSpectrum& f, double x_center = 0.0);

/// |e> (x) photon_state(grid, f)
TwoExcState excited_plus_photon(const ModeGrid& grid, const PulseSpectrum& f);

struct EvolutionPlan {
  double t_end = 0.0;
  double dt = 0.0;
  std::size_t snapshot_every = 0;  // 0: keep only the final state
};

/// dt = safety / max|omega_k - Omega|, shrunk so an integer number of steps
/// reaches t_end exactly.
EvolutionPlan make_plan(const ModeGrid& grid, double t_start, double t_end,
                        double safety = 0.05, std::size_t snapshot_every = 0);

/// Throws PlanError when dt * max|omega_k - Omega| > 0.1 or t_end < t_start.
void check_plan(const ModeGrid& grid, const EvolutionPlan& plan, double t_start);

template <class State>
struct Trajectory {
  std::vector<State> snapshots;  // includes the initial and the final state
};

Trajectory<OneExcState> evolve_one_exc(const OneExcState& initial, const ModeGrid& grid,
                                       const EvolutionPlan& plan);
Trajectory<TwoExcState> evolve_two_exc(const TwoExcState& initial, const ModeGrid& grid,
                                       const EvolutionPlan& plan);

/// In-place evolution to t_end with the default plan.
void propagate(OneExcState& state, const ModeGrid& grid, double t_end);
void propagate(TwoExcState& state, const ModeGrid& grid, double t_end);

/// Which directional modes the detector couples to. `outgoing` keeps the
/// branch that propagates away from the qubit at the detector position
/// (forward for x > 0, backward for x < 0).
enum class FieldBranch { both, forward, backward, outgoing };

/// E+(x) = i sum_k g_k (exp(i w_k x / v_g) a_k + exp(-i w_k x / v_g) b_k) applied
/// at time state.t. Returns the lab-frame vacuum amplitude.
cplx apply_Eplus(const OneExcState& state, double x, const ModeGrid& grid,
                 FieldBranch branch = FieldBranch::both);

/// Two-excitation to one-excitation; the result stays in the rotating frame
/// at the same time.
OneExcState apply_Eplus(const TwoExcState& state, double x, const ModeGrid& grid,
                        FieldBranch branch = FieldBranch::both);

struct OracleValue {
  double value = 0.0;
  bool guard_violated = false;
};

/// Evolves to t and returns |E+(x)|psi(t)>|^2.
OracleValue oracle_g1(const OneExcState& initial, double x, double t, const ModeGrid& grid,
                      FieldBranch branch = FieldBranch::both);
OracleValue oracle_g1(const TwoExcState& initial, double x, double t, const ModeGrid& grid,
                      FieldBranch branch = FieldBranch::both);

/// G1 along a time-ordered list of samples, with a single evolution.
struct SpaceTime {
  double x;
  double t;
};
std::vector<OracleValue> oracle_g1_series(const OneExcState& initial,
                                          std::span<const SpaceTime> samples,
                                          const ModeGrid& grid,
                                          FieldBranch branch = FieldBranch::both);

/// |E+(x)|^2 of the photon state evolved without the qubit.
double free_field_density(const OneExcState& photon, double x, double t, const ModeGrid& grid,
                          FieldBranch branch = FieldBranch::both);

struct OracleG2Options {
  // Extra retarded time added to both clicks (the first click lands at
  // T1 = first_click_delay instead of exactly on the light cone).
  double first_click_delay = 0.0;
  FieldBranch branch = FieldBranch::outgoing;
};

struct OracleG2Point {
  double delta_T = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  // Pathway amplitudes with intermediate states taken at t = 0, as in the
  // closed forms: path2 goes through |e,0>, path1 through the photon sector.
  // path2 = <0|E+(x2,t2)|e,0>_H <e,0|E+(x1,t1)|psi>_H, path1 = total - path2.
  cplx path1;
  cplx path2;
  double full = 0.0;
  bool guard_violated = false;
};

/// Sequential field application: evolve to t1, apply E+(x1), evolve the
/// one-excitation remainder to each t2, apply E+(x2). Raw units.
std::vector<OracleG2Point> oracle_g2_sweep(const TwoExcState& initial,
                                           const DetectorConfig& config,
                                           std::span<const double> delta_T_grid,
                                           const ModeGrid& grid,
                                           const OracleG2Options& options = {});

OracleG2Point oracle_g2(const TwoExcState& initial, const DetectorConfig& config,
                        const ModeGrid& grid, const OracleG2Options& options = {});

}  // namespace wgqed::oracle
