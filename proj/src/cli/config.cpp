#include "wgqed/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace wgqed::cli {

namespace {

enum class Dim { none, frequency, time, length };

struct KeySpec {
  std::string_view section;
  std::string_view base;
  Dim dim;
};

constexpr KeySpec kKeys[] = {
    {"system", "omega_q", Dim::frequency},
    {"system", "gamma", Dim::frequency},
    {"system", "rabi_split", Dim::frequency},
    {"system", "delta_pw", Dim::frequency},
    {"system", "profile", Dim::none},
    {"pulse", "kind", Dim::none},
    {"pulse", "detuning", Dim::frequency},
    {"pulse", "sigma", Dim::frequency},
    {"detectors", "near", Dim::length},
    {"detectors", "far", Dim::length},
    {"detectors", "geometries", Dim::none},
    {"detectors", "delta_t1", Dim::time},
    {"grid", "delta_T", Dim::time},
    {"grid", "detuning", Dim::frequency},
    {"grid", "rabi_split", Dim::frequency},
    {"grid", "x", Dim::length},
    {"grid", "t", Dim::time},
    {"oracle", "quantity", Dim::none},
    {"oracle", "modes", Dim::none},
    {"oracle", "margin", Dim::frequency},
    {"oracle", "t_end", Dim::time},
    {"output", "directory", Dim::none},
    {"output", "formats", Dim::none},
    {"output", "raw", Dim::none},
};

std::string_view suffix_for(Dim dim) {
  switch (dim) {
    case Dim::frequency: return "_in_";
    case Dim::time: return "_in_inv_";
    case Dim::length: return "_in_vg_over_";
    case Dim::none: return "";
  }
  return "";
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// A key with its unit stripped off.
struct ResolvedKey {
  const KeySpec* spec;
  std::string unit;  // empty for dimensionless keys
};

class Parser {
 public:
  Parser(std::string source, Command command) : source_(std::move(source)) {
    config_.command = command;
    config_.source = source_;
  }

  RunConfig run(std::string_view text) {
    read(text);
    resolve();
    return std::move(config_);
  }

 private:
  [[noreturn]] void fail(std::size_t line, const std::string& field, const std::string& message) const {
    throw ConfigParseError(source_, line, field, message);
  }

  [[noreturn]] void fail(const ConfigEntry& e, const std::string& message) const {
    fail(e.line, e.section + "." + e.key, message);
  }

  void read(std::string_view text) {
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++line_no;
      const auto hash = raw.find('#');
      const std::string line = trim(raw.substr(0, hash));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(line_no, line, "unterminated section header");
        section = trim(std::string_view(line).substr(1, line.size() - 2));
        const bool known = std::any_of(std::begin(kKeys), std::end(kKeys),
                                       [&](const KeySpec& k) { return k.section == section; });
        if (!known) fail(line_no, section, "unknown section [" + section + "]");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, line, "expected 'key = value'");
      const std::string key = trim(std::string_view(line).substr(0, eq));
      const std::string value = trim(std::string_view(line).substr(eq + 1));
      if (section.empty()) fail(line_no, key, "key outside of any section");
      if (key.empty()) fail(line_no, section, "missing key before '='");
      for (const auto& e : config_.entries) {
        if (e.section == section && e.key == key) {
          fail(line_no, section + "." + key,
               "duplicate key (first given on line " + std::to_string(e.line) + ")");
        }
      }
      config_.entries.push_back({section, key, value, line_no});
    }
  }

  ResolvedKey classify(const ConfigEntry& e) const {
    for (const auto& spec : kKeys) {
      if (spec.section != e.section) continue;
      if (spec.dim == Dim::none) {
        if (e.key == spec.base) return {&spec, {}};
        continue;
      }
      const std::string prefix = std::string(spec.base) + std::string(suffix_for(spec.dim));
      if (e.key.rfind(prefix, 0) == 0) {
        const std::string unit = e.key.substr(prefix.size());
        if (unit == "gamma" || unit == "omega_q") return {&spec, unit};
        fail(e, "unknown unit '" + unit + "' (use gamma or omega_q)");
      }
    }
    for (const auto& spec : kKeys) {
      if (spec.section == e.section && spec.dim != Dim::none &&
          (e.key == spec.base || e.key.rfind(std::string(spec.base) + "_in_", 0) == 0)) {
        fail(e, "missing or wrong unit suffix; expected " + std::string(spec.base) +
                    std::string(suffix_for(spec.dim)) + "<gamma|omega_q>");
      }
    }
    fail(e, "unknown key");
  }

  double number(const ConfigEntry& e, std::string_view text) const {
    const std::string s = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      fail(e, "'" + s + "' is not a finite number");
    }
    return v;
  }

  std::vector<double> values(const ConfigEntry& e) const {
    const std::string& v = e.value;
    if (v.empty()) fail(e, "empty grid");
    std::vector<double> out;
    if (v.rfind("linspace(", 0) == 0) {
      if (v.back() != ')') fail(e, "linspace(...) is missing ')'");
      const auto args = split_list(std::string_view(v).substr(9, v.size() - 10));
      if (args.size() != 3) fail(e, "linspace needs (start, stop, count)");
      const double a = number(e, args[0]);
      const double b = number(e, args[1]);
      const double n = number(e, args[2]);
      if (!(n >= 1.0) || n != std::floor(n) || n > 1e7) fail(e, "linspace count must be a positive integer");
      const auto count = static_cast<std::size_t>(n);
      if (count == 1) {
        out.push_back(a);
      } else {
        for (std::size_t i = 0; i < count; ++i) {
          out.push_back(i + 1 == count ? b
                                       : a + (b - a) * static_cast<double>(i) /
                                                 static_cast<double>(count - 1));
        }
      }
    } else {
      for (const auto& item : split_list(v)) out.push_back(number(e, item));
    }
    return out;
  }

  GridSpec grid(const ConfigEntry& e, double scale) const {
    GridSpec g;
    g.text = e.value;
    g.values = values(e);
    for (auto& x : g.values) x *= scale;
    for (std::size_t i = 1; i < g.values.size(); ++i) {
      if (!(g.values[i] > g.values[i - 1])) fail(e, "grid must be strictly increasing");
    }
    return g;
  }

  void resolve() {
    // Unit family and conversion factor to Gamma = 1.
    std::vector<std::pair<const ConfigEntry*, ResolvedKey>> keys;
    const ConfigEntry* unit_entry = nullptr;
    for (const auto& e : config_.entries) {
      const auto r = classify(e);
      if (!r.unit.empty()) {
        if (config_.unit.empty()) {
          config_.unit = r.unit;
          unit_entry = &e;
        } else if (config_.unit != r.unit) {
          fail(e, "unit '" + r.unit + "' mixed with '" + config_.unit + "' used on line " +
                      std::to_string(unit_entry->line) + "; a file uses one unit");
        }
      }
      keys.emplace_back(&e, r);
    }
    if (config_.unit.empty()) config_.unit = "gamma";

    auto find = [&](std::string_view section, std::string_view base) -> const ConfigEntry* {
      for (const auto& [e, r] : keys) {
        if (r.spec->section == section && r.spec->base == base) return e;
      }
      return nullptr;
    };
    auto missing = [&](std::string_view section, std::string_view base, Dim dim,
                       const std::string& why) {
      std::string key = std::string(base);
      if (dim != Dim::none) key += std::string(suffix_for(dim)) + config_.unit;
      fail(0, std::string(section) + "." + key, why);
    };

    double scale = 1.0;  // one configured frequency unit in units of Gamma
    if (config_.unit == "gamma") {
      if (const auto* e = find("system", "gamma")) fail(*e, "gamma is the unit of this file");
      const auto* e = find("system", "omega_q");
      if (!e) missing("system", "omega_q", Dim::frequency, "required");
      config_.params.omega_q = number(*e, e->value);
    } else {
      if (const auto* e = find("system", "omega_q")) fail(*e, "omega_q is the unit of this file");
      const auto* e = find("system", "gamma");
      if (!e) missing("system", "gamma", Dim::frequency, "required");
      const double g = number(*e, e->value);
      if (!(g > 0.0)) fail(*e, "must be positive");
      scale = 1.0 / g;
      config_.params.omega_q = scale;
    }
    config_.params.gamma = 1.0;
    config_.params.v_g = 1.0;
    const double freq = scale;
    const double time = 1.0 / scale;

    config_.params.lambda_rabi = 0.0;
    config_.params.delta_pw = 0.1 * config_.params.omega_q;
    for (const auto& [e, r] : keys) {
      const std::string section(r.spec->section);
      const std::string base(r.spec->base);
      if (section == "system") {
        if (base == "rabi_split") {
          const double s = number(*e, e->value) * freq;
          if (!(s >= 0.0)) fail(*e, "must be non-negative");
          config_.params.lambda_rabi = 0.25 * s * s;
        } else if (base == "delta_pw") {
          config_.params.delta_pw = number(*e, e->value) * freq;
        } else if (base == "profile") {
          if (e->value == "resonance") {
            config_.params.profile = CouplingProfile::resonance;
          } else if (e->value == "physical") {
            config_.params.profile = CouplingProfile::physical;
          } else {
            fail(*e, "expected resonance or physical");
          }
        }
      } else if (section == "pulse") {
        if (base == "kind") {
          if (e->value != "plane" && e->value != "gaussian") fail(*e, "expected plane or gaussian");
          config_.pulse_kind = e->value;
        } else if (base == "detuning") {
          config_.detuning = number(*e, e->value) * freq;
        } else if (base == "sigma") {
          config_.sigma = number(*e, e->value) * freq;
          if (!(config_.sigma > 0.0)) fail(*e, "must be positive");
        }
      } else if (section == "detectors") {
        if (base == "near") {
          config_.detectors.near = number(*e, e->value) * time;
        } else if (base == "far") {
          config_.detectors.far = number(*e, e->value) * time;
        } else if (base == "delta_t1") {
          config_.detectors.delta_t1 = number(*e, e->value) * time;
        } else if (base == "geometries") {
          config_.detectors.geometries.clear();
          for (const auto& item : split_list(e->value)) {
            const auto g = parse_geometry(item);
            if (!g) fail(*e, "unknown geometry '" + item + "' (use ++, --, +-, -+)");
            config_.detectors.geometries.push_back(*g);
          }
        }
      } else if (section == "grid") {
        const double s = r.spec->dim == Dim::frequency ? freq : time;
        auto g = grid(*e, s);
        if (base == "delta_T") {
          if (g.values.front() < 0.0) fail(*e, "delay must be non-negative");
          config_.delta_T = std::move(g);
        } else if (base == "detuning") {
          config_.detuning_grid = std::move(g);
        } else if (base == "rabi_split") {
          if (g.values.front() < 0.0) fail(*e, "splitting must be non-negative");
          config_.rabi_split_grid = std::move(g);
        } else if (base == "x") {
          for (double x : g.values) {
            if (x == 0.0) fail(*e, "x = 0 is the qubit position");
          }
          config_.x_grid = std::move(g);
        } else if (base == "t") {
          if (g.values.front() < 0.0) fail(*e, "time must be non-negative");
          config_.t_grid = std::move(g);
        }
      } else if (section == "oracle") {
        if (base == "quantity") {
          bool found = false;
          for (auto q : {OracleQuantity::transmission, OracleQuantity::free_field,
                         OracleQuantity::g1_pulse, OracleQuantity::g2, OracleQuantity::decay}) {
            if (e->value == to_string(q)) {
              config_.oracle.quantity = q;
              found = true;
            }
          }
          if (!found) fail(*e, "expected transmission, free-field, g1-pulse, g2 or decay");
        } else if (base == "modes") {
          const double n = number(*e, e->value);
          if (!(n >= 1.0) || n != std::floor(n)) fail(*e, "must be a positive integer");
          config_.oracle.modes = static_cast<std::size_t>(n);
        } else if (base == "margin") {
          config_.oracle.margin = number(*e, e->value) * freq;
        } else if (base == "t_end") {
          config_.oracle.t_end = number(*e, e->value) * time;
        }
      } else if (section == "output") {
        if (base == "directory") {
          if (e->value.empty()) fail(*e, "empty directory");
          config_.output.directory = e->value;
        } else if (base == "formats") {
          config_.output.csv = config_.output.json = config_.output.svg = false;
          for (const auto& item : split_list(e->value)) {
            if (item == "csv") {
              config_.output.csv = true;
            } else if (item == "json") {
              config_.output.json = true;
            } else if (item == "svg") {
              config_.output.svg = true;
            } else {
              fail(*e, "unknown format '" + item + "' (use csv, json, svg)");
            }
          }
        } else if (base == "raw") {
          if (e->value != "true" && e->value != "false") fail(*e, "expected true or false");
          config_.output.raw = e->value == "true";
        }
      }
    }

    if (const auto* e = find("system", config_.unit == "gamma" ? "omega_q" : "gamma")) {
      const auto report = validate_params(config_.params);
      if (!report.ok()) fail(*e, report.summary());
    }
    if (!(config_.params.omega_q + config_.detuning > 0.0)) {
      const auto* e = find("pulse", "detuning");
      fail(e ? e->line : 0, "pulse.detuning", "carrier frequency must be positive");
    }
    if (!(config_.detectors.far > config_.detectors.near && config_.detectors.near > 0.0)) {
      const auto* e = find("detectors", "far");
      fail(e ? e->line : 0, "detectors.far", "need far > near > 0");
    }
    if (config_.detectors.delta_t1 && !(*config_.detectors.delta_t1 >= 0.0)) {
      fail(find("detectors", "delta_t1")->line, "detectors.delta_t1", "must be non-negative");
    }

    auto require = [&](const std::optional<GridSpec>& g, std::string_view base, Dim dim) {
      if (!g) missing("grid", base, dim, std::string("required by command ") +
                                             std::string(to_string(config_.command)));
    };
    switch (config_.command) {
      case Command::spectrum:
        require(config_.detuning_grid, "detuning", Dim::frequency);
        require(config_.rabi_split_grid, "rabi_split", Dim::frequency);
        break;
      case Command::g1_two_exc:
        require(config_.x_grid, "x", Dim::length);
        require(config_.t_grid, "t", Dim::time);
        break;
      case Command::g2:
        require(config_.delta_T, "delta_T", Dim::time);
        break;
      case Command::sweep:
        require(config_.delta_T, "delta_T", Dim::time);
        require(config_.detuning_grid, "detuning", Dim::frequency);
        break;
      case Command::oracle_compare:
        switch (config_.oracle.quantity) {
          case OracleQuantity::transmission:
            require(config_.detuning_grid, "detuning", Dim::frequency);
            break;
          case OracleQuantity::free_field:
          case OracleQuantity::g1_pulse:
            require(config_.x_grid, "x", Dim::length);
            require(config_.t_grid, "t", Dim::time);
            break;
          case OracleQuantity::g2:
            require(config_.delta_T, "delta_T", Dim::time);
            break;
          case OracleQuantity::decay:
            require(config_.t_grid, "t", Dim::time);
            break;
        }
        if (config_.pulse_kind == "plane" && config_.oracle.quantity != OracleQuantity::decay) {
          const auto* e = find("pulse", "kind");
          fail(e ? e->line : 0, "pulse.kind",
               "oracle comparisons need a gaussian pulse (a plane wave is not representable on a mode grid)");
        }
        break;
    }
  }

  std::string source_;
  RunConfig config_;
};

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::spectrum: return "spectrum";
    case Command::g1_two_exc: return "g1-two-exc";
    case Command::g2: return "g2";
    case Command::oracle_compare: return "oracle-compare";
    case Command::sweep: return "sweep";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view text) {
  for (auto c : {Command::spectrum, Command::g1_two_exc, Command::g2, Command::oracle_compare,
                 Command::sweep}) {
    if (text == to_string(c)) return c;
  }
  return std::nullopt;
}

std::string_view to_string(OracleQuantity quantity) {
  switch (quantity) {
    case OracleQuantity::transmission: return "transmission";
    case OracleQuantity::free_field: return "free-field";
    case OracleQuantity::g1_pulse: return "g1-pulse";
    case OracleQuantity::g2: return "g2";
    case OracleQuantity::decay: return "decay";
  }
  return "?";
}

namespace {

std::string locate(const std::string& source, std::size_t line, const std::string& field,
                   const std::string& message) {
  std::ostringstream os;
  os << source;
  if (line > 0) os << ":" << line;
  os << ": " << field << ": " << message;
  return os.str();
}

}  // namespace

ConfigParseError::ConfigParseError(std::string source, std::size_t line, std::string field,
                                   std::string message)
    : ConfigError(locate(source, line, field, message)), line_(line), field_(std::move(field)) {}

DetectorConfig DetectorSpec::config(Geometry geometry, double delta_T) const {
  DetectorConfig c;
  const bool first = geometry == Geometry::pp || geometry == Geometry::pm;
  const bool second = geometry == Geometry::pp || geometry == Geometry::mp;
  c.x1 = first ? near : -near;
  c.x2 = second ? far : -far;
  c.delta_T = delta_T;
  c.delta_t1 = delta_t1;
  return c;
}

PulseSpectrum RunConfig::pulse() const { return pulse_at(detuning); }

PulseSpectrum RunConfig::pulse_at(double d) const {
  const double w0 = params.omega_q + d;
  if (pulse_kind == "gaussian") return GaussianPulse{w0, sigma};
  return PlaneWave{w0};
}

RunConfig parse_config(std::string_view text, Command command, const std::string& source) {
  return Parser(source, command).run(text);
}

RunConfig load_config(const std::filesystem::path& path, Command command) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigParseError(path.string(), 0, "file", "cannot open configuration file");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str(), command, path.string());
}

void prepare_output_directory(const RunConfig& config) {
  const auto& dir = config.output.directory;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw ConfigParseError(config.source, 0, "output.directory",
                           "cannot create '" + dir.string() + "': " + ec.message());
  }
  const auto probe = dir / ".wgqed-write-probe";
  {
    std::ofstream out(probe);
    if (!out) {
      throw ConfigParseError(config.source, 0, "output.directory",
                             "'" + dir.string() + "' is not writable");
    }
  }
  std::filesystem::remove(probe, ec);
}

}  // namespace wgqed::cli
