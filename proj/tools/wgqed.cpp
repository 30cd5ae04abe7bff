// wgqed: batch front-end for the waveguide QED correlation library.
//
//   wgqed <spectrum|g1-two-exc|g2|sweep|oracle-compare> --config FILE [--output DIR]
//
// Exit codes: 0 success, 2 configuration error, 3 compute error,
// 4 an oracle sample crossed the recurrence guard.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wgqed/cli/config.hpp"
#include "wgqed/cli/manifest.hpp"
#include "wgqed/cli/runner.hpp"
#include "wgqed/cli/worker_pool.hpp"
#include "wgqed/error.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCompute = 3;
constexpr int kExitGuard = 4;

}  // namespace

int main(int argc, char** argv) {
  using namespace wgqed;

  CLI::App app{"Waveguide QED correlation functions: spectra, g2 sweeps and oracle checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cli::kEngineVersion));

  std::string config_path;
  std::string output_dir;
  bool quiet = false;
  for (const char* name : {"spectrum", "g1-two-exc", "g2", "sweep", "oracle-compare"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "run configuration file")->required();
    sub->add_option("-o,--output", output_dir, "override output.directory");
    sub->add_flag("-q,--quiet", quiet, "do not print the summary");
  }
  app.get_subcommand("spectrum")->description("time-averaged two-excitation spectrum g1_av");
  app.get_subcommand("g1-two-exc")->description("two-excitation G1 over an (x, t) grid");
  app.get_subcommand("g2")->description("g2 against Delta T for each detector geometry");
  app.get_subcommand("sweep")->description("g2 against Delta T and carrier detuning");
  app.get_subcommand("oracle-compare")->description("discretized-mode oracle against closed forms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const auto* selected = app.get_subcommands().front();
  const auto command = cli::parse_command(selected->get_name());

  cli::RunConfig config;
  std::size_t workers = 1;
  try {
    config = cli::load_config(config_path, *command);
    if (!output_dir.empty()) config.output.directory = output_dir;
    workers = cli::worker_count();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wgqed: configuration error: %s\n", e.what());
    return kExitConfig;
  }

  cli::RunResult result;
  try {
    result = cli::run(config, workers);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "wgqed: configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wgqed: compute error: %s\n", e.what());
    return kExitCompute;
  }

  if (!quiet) {
    for (const auto& f : result.files) {
      std::printf("%s  %s/%s\n", f.sha256.c_str(), config.output.directory.string().c_str(),
                  f.name.c_str());
    }
    if (!result.compute.summary.empty()) std::printf("%s\n", result.compute.summary.dump(2).c_str());
  }
  if (result.compute.guard_flag) {
    std::fprintf(stderr, "wgqed: oracle samples past the recurrence guard were flagged\n");
    return kExitGuard;
  }
  return kExitOk;
}
