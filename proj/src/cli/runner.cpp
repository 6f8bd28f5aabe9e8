#include "evalbench/cli/runner.hpp"

#include <openssl/evp.h>
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "evalbench/cli/experiments.hpp"
#include "evalbench/numcore/error.hpp"
#include "json.hpp"

namespace evalbench::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string file_hash(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return git_blob_sha1(ss.str());
}

}  // namespace

std::string git_blob_sha1(const std::string& content) {
  const std::string head = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) != 1 || EVP_DigestUpdate(ctx, head.data(), head.size()) != 1 ||
      EVP_DigestUpdate(ctx, content.data(), content.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw NumericError("SHA-1 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char b[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

std::vector<ExperimentRecord> run_cells(const RunConfig& cfg, std::size_t jobs, std::vector<std::string>& errors) {
  struct Cell {
    std::uint64_t seed;
    std::string method;
  };
  std::vector<Cell> cells;
  for (auto s : cfg.seeds)
    for (const auto& m : cfg.methods()) cells.push_back({s, m});
  std::vector<std::vector<ExperimentRecord>> results(cells.size());
  std::vector<std::string> failures(cells.size());
  const int threads = static_cast<int>(std::max<std::size_t>(1, jobs));
  // each cell is single-threaded inside: nested regions stay serial
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(cells.size()); ++i) {
    const auto& c = cells[static_cast<std::size_t>(i)];
    try {
      results[static_cast<std::size_t>(i)] = run_cell(cfg, c.seed, c.method);
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(i)] = "seed " + std::to_string(c.seed) + ", " + c.method + ": " + e.what();
    }
  }
  std::vector<ExperimentRecord> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!failures[i].empty()) {
      errors.push_back(failures[i]);
      continue;
    }
    out.insert(out.end(), results[i].begin(), results[i].end());
  }
  return out;
}

RunOutcome run(const RunConfig& cfg, const RunOptions& opts) {
  if (cfg.seeds.empty()) throw InvalidArgument("empty seed list");
  const auto started = std::chrono::steady_clock::now();
  const std::string started_at = utc_now();
  RunOutcome o;
  const std::vector<ExperimentRecord> records = run_cells(cfg, opts.jobs, o.errors);

  std::filesystem::create_directories(opts.out_dir);
  o.csv = opts.out_dir / (to_string(cfg.kind) + ".csv");
  o.manifest = opts.out_dir / "manifest.json";
  o.rows = records.size();
  write_csv(o.csv, records);
  o.exit_code = o.errors.empty() ? 0 : 2;

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  nlohmann::ordered_json m;
  m["tool"] = "evalbench";
  m["version"] = kVersion;
  m["experiment"] = to_string(cfg.kind);
  m["config_path"] = opts.config_path;
  m["config"] = cfg.text;
  m["seeds"] = cfg.seeds;
  m["methods"] = cfg.methods();
  m["jobs"] = opts.jobs;
  m["strict"] = opts.strict;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  inputs["config"] = git_blob_sha1(cfg.text);
  if (cfg.dataset.name == "mnist") {
    const char* dir = std::getenv("EVALBENCH_DATA_DIR");
    for (const auto& f : {cfg.dataset.images, cfg.dataset.labels, cfg.dataset.test_images, cfg.dataset.test_labels}) {
      const auto p = dir ? std::filesystem::path(dir) / f : std::filesystem::path(f);
      if (std::filesystem::exists(p)) inputs[f] = file_hash(p);
    }
  }
  m["input_hashes"] = inputs;
  m["outputs"] = {{"csv", o.csv.filename().string()}, {"rows", o.rows}, {"csv_hash", file_hash(o.csv)}};
  m["status"] = o.errors.empty() ? "complete" : "partial";
  m["errors"] = o.errors;
  m["started_at"] = started_at;
  m["wall_clock_seconds"] = wall;
  std::ofstream f(o.manifest);
  if (!f) throw InvalidArgument("cannot write " + o.manifest.string());
  f << m.dump(2) << "\n";
  return o;
}

}  // namespace evalbench::cli
