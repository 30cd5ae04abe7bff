#pragma once

// Run configuration for the batch front-end.
//
// The file is flat "section / key = value" text:
//
//   [system]
//   omega_q_in_gamma = 50
//   rabi_split_in_gamma = 1
//   [grid]
//   delta_T_in_inv_gamma = linspace(0, 6, 601)
//
// Every dimensional key carries its unit in the name. Frequencies end in
// _in_<U>, times in _in_inv_<U>, lengths in _in_vg_over_<U>, where <U> is
// either gamma or omega_q. A file uses one <U> throughout. Internally
// everything is converted to Gamma = 1, v_g = 1.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wgqed/correlation.hpp"
#include "wgqed/error.hpp"
#include "wgqed/model.hpp"

namespace wgqed::cli {

enum class Command { spectrum, g1_two_exc, g2, oracle_compare, sweep };

std::string_view to_string(Command command);
std::optional<Command> parse_command(std::string_view text);

enum class OracleQuantity { transmission, free_field, g1_pulse, g2, decay };

std::string_view to_string(OracleQuantity quantity);

/// Parse or validation failure, located at a line (0 when the key is
/// missing altogether) and a "section.key" field.
class ConfigParseError : public ConfigError {
 public:
  ConfigParseError(std::string source, std::size_t line, std::string field, std::string message);

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line;
};

/// Sample points of one sweep axis, in canonical units.
struct GridSpec {
  std::vector<double> values;
  std::string text;  // as written in the file
};

struct DetectorSpec {
  double near = 1.0;  // |x1|
  double far = 2.0;   // |x2|
  std::vector<Geometry> geometries{Geometry::pp};
  std::optional<double> delta_t1;

  DetectorConfig config(Geometry geometry, double delta_T) const;
};

struct OracleSpec {
  OracleQuantity quantity = OracleQuantity::g2;
  std::size_t modes = 200;
  double margin = 50.0;
  std::optional<double> t_end;
};

struct OutputSpec {
  std::filesystem::path directory = "out";
  bool csv = true;
  bool json = true;
  bool svg = false;
  bool raw = false;  // un-normalized G values in g2 tables
};

struct RunConfig {
  Command command = Command::g2;
  std::string source;     // file name used in messages
  std::string unit;       // "gamma" or "omega_q"
  SystemParams params;    // Gamma = 1, v_g = 1
  std::string pulse_kind = "plane";
  double detuning = 0.0;  // carrier omega0 - Omega
  double sigma = 0.05;    // Gaussian width
  DetectorSpec detectors;
  std::optional<GridSpec> delta_T;
  std::optional<GridSpec> detuning_grid;
  std::optional<GridSpec> rabi_split_grid;
  std::optional<GridSpec> x_grid;
  std::optional<GridSpec> t_grid;
  OracleSpec oracle;
  OutputSpec output;
  std::vector<ConfigEntry> entries;

  PulseSpectrum pulse() const;
  PulseSpectrum pulse_at(double detuning) const;
};

/// Parses and validates a configuration for `command`. Relative output
/// directories are kept relative to the working directory.
RunConfig parse_config(std::string_view text, Command command, const std::string& source = "<config>");

RunConfig load_config(const std::filesystem::path& path, Command command);

/// Creates the output directory and checks that it accepts files.
void prepare_output_directory(const RunConfig& config);

}  // namespace wgqed::cli
