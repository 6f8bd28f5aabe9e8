#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "evalbench/cli/config.hpp"
#include "evalbench/cli/records.hpp"

namespace evalbench::cli {

/// SHA-1 of "blob <size>\0<content>", as git hash-object prints it.
std::string git_blob_sha1(const std::string& content);

struct RunOptions {
  std::filesystem::path out_dir;
  std::size_t jobs = 1;
  bool strict = false;
  std::string config_path;  // echoed into the manifest
};

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 a cell failed (partial results written)
  std::filesystem::path csv;
  std::filesystem::path manifest;
  std::vector<std::string> errors;
  std::size_t rows = 0;
};

/// Fans out over (seed, method) cells, up to `jobs` at a time, and writes
/// <kind>.csv in cell order plus manifest.json. Cell records do not depend
/// on the job count.
RunOutcome run(const RunConfig& cfg, const RunOptions& opts);

/// Records of every cell, concatenated in (seed, method) order; failed cells
/// contribute nothing and add an entry to `errors`.
std::vector<ExperimentRecord> run_cells(const RunConfig& cfg, std::size_t jobs, std::vector<std::string>& errors);

}  // namespace evalbench::cli
