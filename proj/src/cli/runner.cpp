#include "wgqed/cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <numeric>
#include <sstream>
#include <thread>

#include "wgqed/cli/manifest.hpp"
#include "wgqed/cli/worker_pool.hpp"
#include "wgqed/correlation.hpp"
#include "wgqed/oracle.hpp"
#include "wgqed/quadrature.hpp"

namespace wgqed::cli {

using nlohmann::json;

std::size_t worker_count() {
  const char* env = std::getenv("WGQED_WORKERS");
  if (env == nullptr || *env == '\0') {
    return std::max(1u, std::thread::hardware_concurrency());
  }
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) {
    throw ConfigError(std::string("WGQED_WORKERS must be a positive integer, got '") + env + "'");
  }
  return static_cast<std::size_t>(n);
}

std::vector<std::size_t> local_maxima(const std::vector<double>& y) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] > y[i - 1] && y[i] > y[i + 1]) out.push_back(i);
  }
  return out;
}

namespace {

constexpr std::size_t kMaxPlotSeries = 8;
constexpr std::size_t kMaxOneExcModes = 4000;

std::string slug(Geometry g) {
  switch (g) {
    case Geometry::pp: return "pp";
    case Geometry::mm: return "mm";
    case Geometry::pm: return "pm";
    case Geometry::mp: return "mp";
  }
  return "xx";
}

std::string label(const char* name, double v) {
  std::ostringstream os;
  os << name << " = " << v;
  return os.str();
}

// ---------------------------------------------------------------- spectrum

ComputeResult run_spectrum(const RunConfig& c, std::size_t workers) {
  const auto& splits = c.rabi_split_grid->values;
  const auto& detunings = c.detuning_grid->values;
  const std::size_t nd = detunings.size();
  struct Row {
    double pos;
    double neg;
  };
  const auto rows = parallel_map(splits.size() * nd, workers, [&](std::size_t i) {
    SystemParams p = c.params;
    p.lambda_rabi = 0.25 * splits[i / nd] * splits[i / nd];
    const double w0 = p.omega_q + detunings[i % nd];
    return Row{g1_av_spectrum(w0, Side::positive, p), g1_av_spectrum(w0, Side::negative, p)};
  });

  Artifact a;
  a.stem = "spectrum";
  a.table.header = {"rabi_split_over_gamma", "detuning_over_gamma", "g1_av_positive",
                    "g1_av_negative"};
  a.plot = {"Time-averaged two-excitation spectrum, x > 0", "(omega0 - Omega) / Gamma",
            "g1_av", {}};
  json peaks = json::array();
  for (std::size_t s = 0; s < splits.size(); ++s) {
    Series series{label("2 sqrt(Lambda)/Gamma", splits[s]), detunings, {}};
    for (std::size_t k = 0; k < nd; ++k) {
      const Row& r = rows[s * nd + k];
      a.table.add_row({splits[s], detunings[k], r.pos, r.neg});
      series.y.push_back(r.pos);
    }
    json maxima = json::array();
    for (std::size_t i : local_maxima(series.y)) maxima.push_back(detunings[i]);
    peaks.push_back({{"rabi_split_over_gamma", splits[s]}, {"local_maxima_detuning", maxima}});
    if (a.plot.series.size() < kMaxPlotSeries) a.plot.series.push_back(std::move(series));
  }
  ComputeResult out;
  out.summary["peaks"] = peaks;
  out.artifacts.push_back(std::move(a));
  return out;
}

// -------------------------------------------------------------- g1-two-exc

ComputeResult run_g1_two_exc(const RunConfig& c, std::size_t workers) {
  const auto& xs = c.x_grid->values;
  const auto& ts = c.t_grid->values;
  const double w0 = c.params.omega_q + c.detuning;
  const auto results = parallel_map(xs.size() * ts.size(), workers, [&](std::size_t i) {
    return g1_two_excitation(SpaceTimePoint(xs[i / ts.size()], ts[i % ts.size()]), w0, c.params);
  });
  Artifact a;
  a.stem = "g1_two_exc";
  a.table.header = {"x_gamma_over_vg", "gamma_t", "gamma_tau", "e0", "photon", "g1"};
  a.plot = {"Two-excitation G1 (normalized by the incident density)", "Gamma t", "g1", {}};
  for (std::size_t ix = 0; ix < xs.size(); ++ix) {
    Series series{label("x", xs[ix]), ts, {}};
    for (std::size_t it = 0; it < ts.size(); ++it) {
      const auto& r = results[ix * ts.size() + it];
      a.table.add_row({xs[ix], ts[it], r.point.retarded_time(c.params.v_g), r.breakdown[0].value,
                       r.breakdown[1].value, r.value});
      series.y.push_back(r.value);
    }
    if (a.plot.series.size() < kMaxPlotSeries) a.plot.series.push_back(std::move(series));
  }
  ComputeResult out;
  out.artifacts.push_back(std::move(a));
  return out;
}

// ----------------------------------------------------------------- g2/sweep

double raw_scale(const RunConfig& c) {
  // G2 = g2 Delta Gamma^3 / (2 pi) with Gamma = 1.
  return c.output.raw ? c.params.delta_pw / (2.0 * kPi) : 1.0;
}

ComputeResult run_g2_family(const RunConfig& c, std::size_t workers, bool sweep) {
  const std::vector<double> single{c.detuning};
  const auto& detunings = sweep ? c.detuning_grid->values : single;
  const auto& delays = c.delta_T->values;
  const double scale = raw_scale(c);
  ComputeResult out;
  for (Geometry geom : c.detectors.geometries) {
    const auto curves = parallel_map(detunings.size(), workers, [&](std::size_t i) {
      return g2_sweep(c.detectors.config(geom, 0.0), delays, c.params.omega_q + detunings[i],
                      c.params);
    });
    Artifact a;
    a.stem = std::string(sweep ? "sweep_" : "g2_") + slug(geom);
    if (sweep) a.table.header.push_back("detuning_over_gamma");
    for (const char* h : {"gamma_delta_T", "path1", "path2", "interference", "full"}) {
      a.table.header.push_back(h);
    }
    a.plot.title = std::string("Second-order correlation, geometry (") +
                   std::string(to_string(geom)) + ")";
    a.plot.x_label = "Gamma Delta T";
    a.plot.y_label = c.output.raw ? "G2" : "g2";
    for (std::size_t i = 0; i < detunings.size(); ++i) {
      std::vector<double> full;
      std::vector<double> p1;
      std::vector<double> p2;
      std::vector<double> in;
      for (const auto& d : curves[i]) {
        std::vector<Cell> row;
        if (sweep) row.emplace_back(detunings[i]);
        for (double v : {d.delta_T, scale * d.path1, scale * d.path2, scale * d.interference,
                         scale * d.full}) {
          row.emplace_back(v);
        }
        a.table.add_row(std::move(row));
        full.push_back(scale * d.full);
        p1.push_back(scale * d.path1);
        p2.push_back(scale * d.path2);
        in.push_back(scale * d.interference);
      }
      if (sweep) {
        if (a.plot.series.size() < kMaxPlotSeries) {
          a.plot.series.push_back({label("detuning", detunings[i]), delays, full});
        }
      } else {
        a.plot.series = {{"full", delays, full},
                         {"path1", delays, p1},
                         {"path2", delays, p2},
                         {"interference", delays, in}};
      }
    }
    out.artifacts.push_back(std::move(a));
  }
  return out;
}

// ---------------------------------------------------------- oracle-compare

struct Comparison {
  std::vector<std::string> indep_names;
  std::vector<std::vector<double>> indep;
  std::vector<double> analytic;
  std::vector<double> oracle;
  std::vector<bool> guard;
};

void add_sample(Comparison& cmp, std::vector<double> indep, double analytic, double oracle,
                bool guard) {
  cmp.indep.push_back(std::move(indep));
  cmp.analytic.push_back(analytic);
  cmp.oracle.push_back(oracle);
  cmp.guard.push_back(guard);
}

oracle::ModeGrid oracle_grid(const RunConfig& c, bool two_excitation) {
  if (!two_excitation && c.oracle.modes > kMaxOneExcModes) {
    throw ConfigError("oracle.modes: one-excitation comparisons are limited to " +
                      std::to_string(kMaxOneExcModes) + " modes per direction");
  }
  auto grid = oracle::build_grid(c.params, c.oracle.modes, c.oracle.margin);
  return grid;
}

double incident_density(const PulseSpectrum& f, const SystemParams& p, double x, double t) {
  const auto [lo, hi] = pulse_support(f);
  SpectralKernel k;
  k.lo = std::max(lo, std::nextafter(0.0, 1.0));
  k.hi = hi;
  k.feature_scale = pulse_feature_scale(f);
  k.evaluate = [&](double w) {
    return coupling_g(w, p) * pulse_amplitude(f, w) * std::exp(-kI * (w * (t - x / p.v_g)));
  };
  QuadratureOptions o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-10;
  o.plan = oscillation_guard(k, std::abs(t - x / p.v_g));
  return std::norm(integrate(k, o).value);
}

Comparison compare_transmission(const RunConfig& c, std::size_t workers) {
  const auto grid = oracle_grid(c, false);
  const auto& detunings = c.detuning_grid->values;
  // |f(t)|^2 has standard deviation 1 / (sqrt(2) sigma); starting 3 / sigma
  // upstream leaves about 1e-5 of the packet overlapping the qubit.
  const double lead = 3.0 / c.sigma;
  const double t_end = c.oracle.t_end.value_or(2.0 * lead);
  struct Point {
    double analytic;
    double oracle;
  };
  const auto points = parallel_map(detunings.size(), workers, [&](std::size_t i) {
    const PulseSpectrum f = c.pulse_at(detunings[i]);
    const auto [lo, hi] = pulse_support(f);
    SpectralKernel k;
    k.lo = std::max(lo, std::nextafter(0.0, 1.0));
    k.hi = hi;
    k.feature_scale = std::min(c.params.gamma, c.sigma);
    k.evaluate = [&](double w) {
      return cplx{std::norm(transmission_amplitude(w, c.params)) * std::norm(pulse_amplitude(f, w)),
                  0.0};
    };
    const double analytic = integrate(k, 1e-12).value.real();
    auto s = oracle::photon_state(grid, f, -lead);
    oracle::propagate(s, grid, t_end);
    double forward = 0.0;
    for (const auto& a : s.forward()) forward += std::norm(a);
    return Point{analytic, forward};
  });
  Comparison cmp;
  cmp.indep_names = {"detuning_over_gamma"};
  for (std::size_t i = 0; i < detunings.size(); ++i) {
    add_sample(cmp, {detunings[i]}, points[i].analytic, points[i].oracle, t_end > grid.guard_time());
  }
  return cmp;
}

Comparison compare_free_field(const RunConfig& c, std::size_t workers) {
  const auto grid = oracle_grid(c, false);
  const PulseSpectrum f = c.pulse();
  const auto photon = oracle::photon_state(grid, f);
  const auto& xs = c.x_grid->values;
  const auto& ts = c.t_grid->values;
  struct Point {
    double analytic;
    double oracle;
  };
  const auto points = parallel_map(xs.size() * ts.size(), workers, [&](std::size_t i) {
    const double x = xs[i / ts.size()];
    const double t = ts[i % ts.size()];
    return Point{incident_density(f, c.params, x, t),
                 oracle::free_field_density(photon, x, t, grid, oracle::FieldBranch::forward)};
  });
  Comparison cmp;
  cmp.indep_names = {"x_gamma_over_vg", "gamma_t"};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double t = ts[i % ts.size()];
    add_sample(cmp, {xs[i / ts.size()], t}, points[i].analytic, points[i].oracle,
               t > grid.guard_time());
  }
  return cmp;
}

Comparison compare_g1_pulse(const RunConfig& c, std::size_t workers) {
  const auto grid = oracle_grid(c, false);
  const PulseSpectrum f = c.pulse();
  const auto& xs = c.x_grid->values;
  const auto& ts = c.t_grid->values;
  std::vector<oracle::SpaceTime> samples;
  for (double t : ts) {
    for (double x : xs) samples.push_back({x, t});
  }
  const auto analytic = parallel_map(samples.size(), workers, [&](std::size_t i) {
    return g1_pulse(SpaceTimePoint(samples[i].x, samples[i].t), f, c.params).value;
  });
  const auto values = oracle::oracle_g1_series(oracle::photon_state(grid, f), samples, grid,
                                               oracle::FieldBranch::outgoing);
  Comparison cmp;
  cmp.indep_names = {"x_gamma_over_vg", "gamma_t"};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    add_sample(cmp, {samples[i].x, samples[i].t}, analytic[i], values[i].value,
               values[i].guard_violated);
  }
  return cmp;
}

Comparison compare_g2(const RunConfig& c, std::size_t workers) {
  const auto grid = oracle_grid(c, true);
  const PulseSpectrum f = c.pulse();
  const double w0 = c.params.omega_q + c.detuning;
  const auto& delays = c.delta_T->values;
  for (Geometry g : c.detectors.geometries) {
    if (g == Geometry::mm || g == Geometry::mp) {
      throw ConfigError(
          "detectors.geometries: oracle g2 comparisons need the first detector at x1 > 0");
    }
  }
  const auto curves = parallel_map(c.detectors.geometries.size(), workers, [&](std::size_t i) {
    const auto config = c.detectors.config(c.detectors.geometries[i], 0.0);
    return oracle::oracle_g2_sweep(oracle::excited_plus_photon(grid, f), config, delays, grid);
  });
  const auto photon = oracle::photon_state(grid, f);
  Comparison cmp;
  cmp.indep_names = {"geometry", "gamma_delta_T"};
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const Geometry geom = c.detectors.geometries[i];
    for (const auto& p : curves[i]) {
      auto config = c.detectors.config(geom, p.delta_T);
      const double analytic = g2(config, w0, c.params).full;
      // The first click sits exactly on the light cone of x1, where the
      // band-limited scattered front reaches half its height: the one-sided
      // limit of the photon-sector pathway is twice the sampled value.
      const double incident = oracle::free_field_density(photon, config.x2, p.t2, grid);
      const double value = std::norm(2.0 * p.path1 + p.path2) / incident;
      add_sample(cmp, {static_cast<double>(i), p.delta_T}, analytic, value, p.guard_violated);
    }
  }
  return cmp;
}

Comparison compare_decay(const RunConfig& c, json& summary) {
  const auto grid = oracle_grid(c, false);
  auto s = oracle::excited_state(grid);
  Comparison cmp;
  cmp.indep_names = {"gamma_t"};
  std::vector<double> logs;
  for (double t : c.t_grid->values) {
    oracle::propagate(s, grid, t);
    const double pop = std::norm(s.excited());
    add_sample(cmp, {t}, std::exp(-2.0 * c.params.gamma * t), pop, t > grid.guard_time());
    logs.push_back(std::log(pop));
  }
  const auto& ts = c.t_grid->values;
  if (ts.size() >= 2) {
    const double n = static_cast<double>(ts.size());
    const double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / n;
    const double ml = std::accumulate(logs.begin(), logs.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      sxy += (ts[i] - mt) * (logs[i] - ml);
      sxx += (ts[i] - mt) * (ts[i] - mt);
    }
    const double rate = -sxy / sxx;
    summary["fitted_rate_over_gamma"] = rate / c.params.gamma;
    summary["fitted_rate_rel_error"] = std::abs(rate - 2.0 * c.params.gamma) / (2.0 * c.params.gamma);
  }
  return cmp;
}

ComputeResult run_oracle_compare(const RunConfig& c, std::size_t workers) {
  ComputeResult out;
  Comparison cmp;
  switch (c.oracle.quantity) {
    case OracleQuantity::transmission: cmp = compare_transmission(c, workers); break;
    case OracleQuantity::free_field: cmp = compare_free_field(c, workers); break;
    case OracleQuantity::g1_pulse: cmp = compare_g1_pulse(c, workers); break;
    case OracleQuantity::g2: cmp = compare_g2(c, workers); break;
    case OracleQuantity::decay: cmp = compare_decay(c, out.summary); break;
  }

  Artifact a;
  a.stem = "oracle_" + std::string(to_string(c.oracle.quantity));
  std::replace(a.stem.begin(), a.stem.end(), '-', '_');
  a.table.header.push_back("sample");
  for (const auto& n : cmp.indep_names) a.table.header.push_back(n);
  for (const char* h : {"analytic", "oracle", "abs_dev", "rel_dev", "guard_violated"}) {
    a.table.header.push_back(h);
  }
  const bool by_geometry = c.oracle.quantity == OracleQuantity::g2;
  double max_rel = 0.0;
  double num = 0.0;
  double den = 0.0;
  std::size_t violations = 0;
  std::vector<double> sample_axis;
  for (std::size_t i = 0; i < cmp.analytic.size(); ++i) {
    const double an = cmp.analytic[i];
    const double orc = cmp.oracle[i];
    const double abs_dev = std::abs(orc - an);
    const double rel_dev = an != 0.0 ? abs_dev / std::abs(an) : (abs_dev == 0.0 ? 0.0 : INFINITY);
    std::vector<Cell> row{static_cast<double>(i)};
    for (std::size_t k = 0; k < cmp.indep[i].size(); ++k) {
      if (by_geometry && k == 0) {
        row.emplace_back(std::string(to_string(c.detectors.geometries[static_cast<std::size_t>(cmp.indep[i][0])])));
      } else {
        row.emplace_back(cmp.indep[i][k]);
      }
    }
    for (double v : {an, orc, abs_dev, rel_dev}) row.emplace_back(v);
    row.emplace_back(cmp.guard[i] ? 1.0 : 0.0);
    a.table.add_row(std::move(row));
    max_rel = std::max(max_rel, rel_dev);
    num += abs_dev * abs_dev;
    den += an * an;
    if (cmp.guard[i]) ++violations;
    sample_axis.push_back(static_cast<double>(i));
  }
  a.plot = {"Oracle against closed form: " + std::string(to_string(c.oracle.quantity)), "sample",
            "value", {{"analytic", sample_axis, cmp.analytic}, {"oracle", sample_axis, cmp.oracle}}};
  out.summary["quantity"] = std::string(to_string(c.oracle.quantity));
  out.summary["samples"] = cmp.analytic.size();
  out.summary["max_rel_dev"] = max_rel;
  out.summary["rel_l2_dev"] = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  out.summary["guard_violations"] = violations;
  out.summary["guard_flag"] = violations > 0;
  out.guard_flag = violations > 0;
  out.artifacts.push_back(std::move(a));
  return out;
}

json resolved_config(const RunConfig& c) {
  json r;
  r["unit"] = c.unit;
  r["omega_q_over_gamma"] = c.params.omega_q;
  r["lambda_over_gamma2"] = c.params.lambda_rabi;
  r["delta_pw_over_gamma"] = c.params.delta_pw;
  r["profile"] = c.params.profile == CouplingProfile::resonance ? "resonance" : "physical";
  r["pulse"] = {{"kind", c.pulse_kind}, {"detuning_over_gamma", c.detuning},
                {"sigma_over_gamma", c.sigma}};
  json geoms = json::array();
  for (auto g : c.detectors.geometries) geoms.push_back(std::string(to_string(g)));
  r["detectors"] = {{"near", c.detectors.near}, {"far", c.detectors.far}, {"geometries", geoms}};
  if (c.detectors.delta_t1) r["detectors"]["delta_t1"] = *c.detectors.delta_t1;
  auto grid = [&](const char* name, const std::optional<GridSpec>& g) {
    if (g) r["grids"][name] = {{"text", g->text}, {"points", g->values.size()},
                               {"first", g->values.front()}, {"last", g->values.back()}};
  };
  grid("delta_T", c.delta_T);
  grid("detuning", c.detuning_grid);
  grid("rabi_split", c.rabi_split_grid);
  grid("x", c.x_grid);
  grid("t", c.t_grid);
  if (c.command == Command::oracle_compare) {
    r["oracle"] = {{"quantity", std::string(to_string(c.oracle.quantity))},
                   {"modes", c.oracle.modes},
                   {"margin_over_gamma", c.oracle.margin}};
    if (c.oracle.t_end) r["oracle"]["t_end"] = *c.oracle.t_end;
  }
  r["output"] = {{"directory", c.output.directory.string()}, {"csv", c.output.csv},
                 {"json", c.output.json}, {"svg", c.output.svg}, {"raw", c.output.raw}};
  return r;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ComputeResult compute(const RunConfig& config, std::size_t workers) {
  switch (config.command) {
    case Command::spectrum: return run_spectrum(config, workers);
    case Command::g1_two_exc: return run_g1_two_exc(config, workers);
    case Command::g2: return run_g2_family(config, workers, false);
    case Command::sweep: return run_g2_family(config, workers, true);
    case Command::oracle_compare: return run_oracle_compare(config, workers);
  }
  return {};
}

RunResult run(const RunConfig& config, std::size_t workers) {
  prepare_output_directory(config);
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  result.compute = compute(config, workers);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto& dir = config.output.directory;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(dir / name, content);
    result.files.push_back({name, content.size(), sha256_hex(content)});
  };
  for (const auto& a : result.compute.artifacts) {
    if (config.output.csv) emit(a.stem + ".csv", to_csv(a.table));
    if (config.output.svg) emit(a.stem + ".svg", render_svg(a.plot));
  }

  json m;
  m["engine"] = {{"name", "wgqed"}, {"version", kEngineVersion}};
  m["command"] = std::string(to_string(config.command));
  json entries = json::array();
  for (const auto& e : config.entries) {
    entries.push_back({{"section", e.section}, {"key", e.key}, {"value", e.value}, {"line", e.line}});
  }
  m["config"] = {{"source", config.source}, {"entries", entries}, {"resolved", resolved_config(config)}};
  m["started_utc"] = started;
  m["wall_clock_seconds"] = elapsed;
  m["workers"] = workers;
  json files = json::array();
  for (const auto& f : result.files) {
    files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  }
  m["files"] = files;
  m["summary"] = result.compute.summary;
  result.manifest = m;
  if (config.output.json) write_file(dir / "manifest.json", m.dump(2) + "\n");
  return result;
}

}  // namespace wgqed::cli
