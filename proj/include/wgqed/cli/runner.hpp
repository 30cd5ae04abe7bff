#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "wgqed/cli/config.hpp"
#include "wgqed/cli/csv.hpp"
#include "wgqed/cli/svg.hpp"

namespace wgqed::cli {

/// One sweep result: written as <stem>.csv and, on request, <stem>.svg.
struct Artifact {
  std::string stem;
  CsvTable table;
  LinePlot plot;
};

struct ComputeResult {
  std::vector<Artifact> artifacts;
  nlohmann::json summary = nlohmann::json::object();
  bool guard_flag = false;  // an oracle sample passed the recurrence guard
};

struct WrittenFile {
  std::string name;
  std::size_t bytes = 0;
  std::string sha256;
};

struct RunResult {
  ComputeResult compute;
  std::vector<WrittenFile> files;
  nlohmann::json manifest;
};

/// Evaluates the command without touching the file system.
ComputeResult compute(const RunConfig& config, std::size_t workers);

/// compute() followed by writing the requested formats and the manifest.
RunResult run(const RunConfig& config, std::size_t workers);

/// Local maxima of y (strictly greater than both neighbours), returned as
/// indices.
std::vector<std::size_t> local_maxima(const std::vector<double>& y);

}  // namespace wgqed::cli
