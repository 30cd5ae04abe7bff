#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "wgqed/cli/config.hpp"
#include "wgqed/cli/csv.hpp"
#include "wgqed/cli/manifest.hpp"
#include "wgqed/cli/runner.hpp"
#include "wgqed/cli/svg.hpp"
#include "wgqed/cli/worker_pool.hpp"

using namespace wgqed;
using namespace wgqed::cli;

namespace {

// Runs the parser and returns the ConfigParseError, failing the test if none
// is thrown.
ConfigParseError parse_error(const std::string& text, Command command = Command::g2) {
  try {
    parse_config(text, command, "t.cfg");
  } catch (const ConfigParseError& e) {
    return e;
  }
  FAIL("expected a ConfigParseError");
  throw;  // unreachable
}

std::string header_line(const CsvTable& t) {
  const std::string csv = to_csv(t);
  return csv.substr(0, csv.find("\r\n"));
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wgqed_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

const char* kMinimalG2 = R"(
[system]
omega_q_in_gamma = 50
[grid]
delta_T_in_inv_gamma = linspace(0, 6, 7)
)";

}  // namespace

TEST_CASE("csv number formatting and quoting") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(4.0) == "4");
  CHECK(format_number(-2.5e-300) == "-2.5e-300");
  CHECK(format_number(1.0 / 3.0) == "0.33333333333333331");
  CHECK(quote_field("plain") == "plain");
  CHECK(quote_field("a,b") == "\"a,b\"");
  CHECK(quote_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(quote_field("two\nlines") == "\"two\nlines\"");

  CsvTable t;
  t.header = {"geometry", "value"};
  t.add_row({std::string("+,-"), 1.5});
  t.add_row({std::string("++"), -0.0});
  CHECK(to_csv(t) == "geometry,value\r\n\"+,-\",1.5\r\n++,0\r\n");
  CHECK_THROWS(t.add_row({1.0}));
  CHECK(t.column("value") == std::vector<double>{1.5, 0.0});
}

TEST_CASE("config: units and conversion") {
  const auto c = parse_config(R"(
[system]
gamma_in_omega_q = 0.02      # Gamma / Omega
rabi_split_in_omega_q = 0.04
delta_pw_in_omega_q = 0.1
[pulse]
detuning_in_omega_q = 0.01
[detectors]
near_in_vg_over_omega_q = 50
far_in_vg_over_omega_q = 100
geometries = +-, -+
[grid]
delta_T_in_inv_omega_q = 0, 50, 100
)",
                              Command::g2);
  CHECK(c.unit == "omega_q");
  CHECK(c.params.gamma == 1.0);
  CHECK(c.params.omega_q == doctest::Approx(50.0));
  CHECK(c.params.rabi_shift() == doctest::Approx(2.0));
  CHECK(c.params.delta_pw == doctest::Approx(5.0));
  CHECK(c.detuning == doctest::Approx(0.5));
  CHECK(c.detectors.near == doctest::Approx(1.0));
  CHECK(c.detectors.far == doctest::Approx(2.0));
  REQUIRE(c.delta_T);
  CHECK(c.delta_T->values[2] == doctest::Approx(2.0));
  REQUIRE(c.detectors.geometries.size() == 2);
  CHECK(c.detectors.geometries[0] == Geometry::pm);
  CHECK(c.entries.size() == 8);
}

TEST_CASE("config: defaults") {
  const auto c = parse_config(kMinimalG2, Command::g2);
  CHECK(c.unit == "gamma");
  CHECK(c.params.lambda_rabi == 0.0);
  CHECK(c.params.delta_pw == doctest::Approx(5.0));
  CHECK(std::holds_alternative<PlaneWave>(c.pulse()));
  CHECK(c.delta_T->values.size() == 7);
  CHECK(c.delta_T->values.back() == 6.0);
  CHECK(c.output.csv);
  CHECK(c.output.json);
  CHECK_FALSE(c.output.svg);
}

TEST_CASE("config: errors carry line and field") {
  SUBCASE("empty delta_T grid") {
    const auto e = parse_error("[system]\nomega_q_in_gamma = 50\n[grid]\ndelta_T_in_inv_gamma =\n");
    CHECK(e.line() == 4);
    CHECK(e.field() == "grid.delta_T_in_inv_gamma");
    CHECK(std::string(e.what()).find("t.cfg:4: grid.delta_T_in_inv_gamma") == 0);
  }
  SUBCASE("non-monotone grid") {
    const auto e = parse_error("[system]\nomega_q_in_gamma = 50\n[grid]\ndelta_T_in_inv_gamma = 0, 2, 1\n");
    CHECK(e.line() == 4);
  }
  SUBCASE("missing unit suffix") {
    const auto e = parse_error("[system]\nomega_q = 50\n");
    CHECK(e.line() == 2);
    CHECK(e.field() == "system.omega_q");
  }
  SUBCASE("mixed units") {
    const auto e = parse_error(
        "[system]\nomega_q_in_gamma = 50\n\n[pulse]\ndetuning_in_omega_q = 0.1\n");
    CHECK(e.line() == 5);
    CHECK(e.field() == "pulse.detuning_in_omega_q");
  }
  SUBCASE("unknown key") {
    const auto e = parse_error(std::string(kMinimalG2) + "[output]\ncolour = red\n");
    CHECK(e.line() == 7);
    CHECK(e.field() == "output.colour");
  }
  SUBCASE("duplicate key") {
    const auto e = parse_error("[system]\nomega_q_in_gamma = 50\nomega_q_in_gamma = 60\n");
    CHECK(e.line() == 3);
  }
  SUBCASE("bad number") {
    const auto e = parse_error("[system]\nomega_q_in_gamma = fifty\n");
    CHECK(e.line() == 2);
  }
  SUBCASE("missing required grid") {
    const auto e = parse_error("[system]\nomega_q_in_gamma = 50\n", Command::sweep);
    CHECK(e.line() == 0);
    CHECK(e.field() == "grid.delta_T_in_inv_gamma");
  }
  SUBCASE("unknown geometry") {
    const auto e = parse_error(std::string(kMinimalG2) + "[detectors]\ngeometries = ++, +0\n");
    CHECK(e.field() == "detectors.geometries");
  }
  SUBCASE("oracle needs a gaussian pulse") {
    const auto e = parse_error(std::string(kMinimalG2) + "[oracle]\nquantity = g2\n",
                               Command::oracle_compare);
    CHECK(e.field() == "pulse.kind");
  }
  SUBCASE("unknown section") {
    const auto e = parse_error("[sytem]\n");
    CHECK(e.line() == 1);
  }
}

TEST_CASE("worker pool keeps index order") {
  const auto out = parallel_map(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  REQUIRE(out.size() == 100);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  CHECK_THROWS_WITH(parallel_map(10, 3,
                                 [](std::size_t i) -> int {
                                   if (i == 7 || i == 3) throw std::runtime_error(std::to_string(i));
                                   return 0;
                                 }),
                    "3");
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("svg is a static SVG document") {
  LinePlot plot{"title <&>", "x", "y", {{"a", {0.0, 1.0, 2.0}, {1.0, 0.5, 0.25}}}};
  const std::string svg = render_svg(plot);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("version=\"1.1\"") != std::string::npos);
  CHECK(svg.find("<script") == std::string::npos);
  CHECK(svg.find("title &lt;&amp;&gt;") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
}

TEST_CASE("golden CSV headers") {
  auto g2cfg = parse_config(std::string(kMinimalG2) + "[detectors]\ngeometries = ++, -+\n",
                            Command::g2);
  auto g2out = compute(g2cfg, 1);
  REQUIRE(g2out.artifacts.size() == 2);
  CHECK(g2out.artifacts[0].stem == "g2_pp");
  CHECK(g2out.artifacts[1].stem == "g2_mp");
  CHECK(header_line(g2out.artifacts[0].table) == "gamma_delta_T,path1,path2,interference,full");

  auto sweep = parse_config(std::string(kMinimalG2) + "detuning_in_gamma = -1, 0, 1\n",
                            Command::sweep);
  auto sweep_out = compute(sweep, 2);
  CHECK(sweep_out.artifacts[0].stem == "sweep_pp");
  CHECK(header_line(sweep_out.artifacts[0].table) ==
        "detuning_over_gamma,gamma_delta_T,path1,path2,interference,full");
  CHECK(sweep_out.artifacts[0].table.rows.size() == 21);

  auto spectrum_cfg = parse_config(
      "[system]\nomega_q_in_gamma = 50\n[grid]\nrabi_split_in_gamma = 2\n"
      "detuning_in_gamma = linspace(-5, 5, 101)\n",
      Command::spectrum);
  auto spec_out = compute(spectrum_cfg, 1);
  CHECK(header_line(spec_out.artifacts[0].table) ==
        "rabi_split_over_gamma,detuning_over_gamma,g1_av_positive,g1_av_negative");
  const auto maxima = spec_out.summary["peaks"][0]["local_maxima_detuning"];
  REQUIRE(maxima.size() == 2);
  CHECK(maxima[0].get<double>() == doctest::Approx(-2.0));
  CHECK(maxima[1].get<double>() == doctest::Approx(2.0));

  auto g1 = parse_config(
      "[system]\nomega_q_in_gamma = 50\nrabi_split_in_gamma = 1\n[grid]\nx_in_vg_over_gamma = -1, 1\n"
      "t_in_inv_gamma = 2, 3\n",
      Command::g1_two_exc);
  CHECK(header_line(compute(g1, 1).artifacts[0].table) ==
        "x_gamma_over_vg,gamma_t,gamma_tau,e0,photon,g1");

  auto oracle = parse_config(
      "[system]\nomega_q_in_gamma = 1000\nprofile = resonance\n[grid]\n"
      "t_in_inv_gamma = 0.5, 1\n[oracle]\nquantity = decay\nmodes = 200\n",
      Command::oracle_compare);
  auto oracle_out = compute(oracle, 1);
  CHECK(oracle_out.artifacts[0].stem == "oracle_decay");
  CHECK(header_line(oracle_out.artifacts[0].table) ==
        "sample,gamma_t,analytic,oracle,abs_dev,rel_dev,guard_violated");
  CHECK(oracle_out.summary.contains("max_rel_dev"));
  CHECK(oracle_out.summary.contains("fitted_rate_over_gamma"));
}

TEST_CASE("g2 resonance table and raw scaling") {
  auto c = parse_config(kMinimalG2, Command::g2);
  const auto out = compute(c, 1);
  const auto& t = out.artifacts[0].table;
  const auto dT = t.column("gamma_delta_T");
  const auto full = t.column("full");
  for (std::size_t i = 0; i < dT.size(); ++i) {
    CHECK(full[i] == doctest::Approx(4.0 * std::exp(-2.0 * dT[i])).epsilon(1e-12));
  }
  c.output.raw = true;
  const auto raw = compute(c, 1).artifacts[0].table.column("full");
  CHECK(raw[0] == doctest::Approx(4.0 * 5.0 / (2.0 * kPi)));
}

TEST_CASE("oracle free field without coupling dynamics") {
  // The free-field comparison never involves the qubit: the oracle packet on
  // a fine grid reproduces the continuum integral.
  auto c = parse_config(
      "[system]\nomega_q_in_gamma = 1000\nprofile = resonance\n[pulse]\nkind = gaussian\n"
      "sigma_in_gamma = 0.2\n[grid]\nx_in_vg_over_gamma = -2, 1\nt_in_inv_gamma = 0, 1, 2\n"
      "[oracle]\nquantity = free-field\nmodes = 2000\nmargin_in_gamma = 20\n",
      Command::oracle_compare);
  const auto out = compute(c, 1);
  CHECK(out.summary["max_rel_dev"].get<double>() < 1e-8);
  CHECK_FALSE(out.guard_flag);
}

TEST_CASE("run writes files with checksums and is deterministic") {
  const auto dir = scratch_dir("run");
  auto c = parse_config(std::string(kMinimalG2) + "[output]\nformats = csv, json, svg\n",
                        Command::g2);
  c.output.directory = dir;
  const auto first = run(c, 1);
  REQUIRE(first.files.size() == 2);
  CHECK(first.files[0].name == "g2_pp.csv");
  CHECK(first.files[1].name == "g2_pp.svg");
  CHECK(sha256_file(dir / "g2_pp.csv") == first.files[0].sha256);
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  CHECK(first.manifest["engine"]["version"] == kEngineVersion);
  CHECK(first.manifest["files"].size() == 2);

  const auto second = run(c, 3);
  CHECK(second.files[0].sha256 == first.files[0].sha256);
  std::filesystem::remove_all(dir);
}

TEST_CASE("unwritable output directory is reported before compute") {
  auto c = parse_config(kMinimalG2, Command::g2);
  c.output.directory = "/proc/wgqed-cannot-exist";
  CHECK_THROWS_AS(run(c, 1), ConfigParseError);
}
