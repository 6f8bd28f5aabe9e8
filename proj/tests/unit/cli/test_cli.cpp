#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "evalbench/cli/config.hpp"
#include "evalbench/cli/experiments.hpp"
#include "evalbench/cli/records.hpp"
#include "evalbench/cli/runner.hpp"
#include "evalbench/numcore/error.hpp"
#include "json.hpp"

using namespace evalbench::cli;
namespace fs = std::filesystem;

namespace {

const char* kTinyContinual = R"(# small split stream
experiment = "continual"
seeds = [0, 1]

[dataset]
name = "prototype_blobs"
n_per_class = 20
test_per_class = 10
dim = 8
active = 4
classes = 6

[model]
hidden = [8]
epochs = 2
batch_size = 16
test_samples = 2

[continual]
tasks = 3
methods = ["vcl", "vcl_coreset", "ewc"]
coreset_size = 4
finetune_epochs = 1
probes = 1
)";

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("evalbench_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_binary(const std::string& args) {
  const char* bin = std::getenv("EVALBENCH_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "EVALBENCH_BIN not set");
  const int status = std::system((std::string(bin) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config grammar") {
  const Document d = Document::parse(R"(
top = 3
[a]
s = "x \"q\" # not a comment"  # comment
f = 1.5e-3
i = -7
b = true
arr = [1, 2, 3,]
mixed = [1, 2.5]
names = ["p", "q"]
[a.b]
k = 1_000
)");
  CHECK(d.get_int("top", 0) == 3);
  CHECK(d.get_string("a.s", "") == "x \"q\" # not a comment");
  CHECK(d.get_double("a.f", 0) == 1.5e-3);
  CHECK(d.get_double("a.i", 0) == -7.0);
  CHECK(d.get_bool("a.b", false));
  CHECK(d.get_sizes("a.arr", {}) == std::vector<std::size_t>{1, 2, 3});
  CHECK(d.get_doubles("a.mixed", {}) == std::vector<double>{1.0, 2.5});
  CHECK(d.get_strings("a.names", {}) == std::vector<std::string>{"p", "q"});
  CHECK(d.get_int("a.b.k", 0) == 1000);
  CHECK(d.get_int("missing", 42) == 42);
  CHECK(d.unused().empty());
  CHECK_THROWS_AS(d.get_string("top", ""), evalbench::InvalidArgument);

  auto fails_on_line = [](const std::string& text, const std::string& line) {
    try {
      Document::parse(text, "c.toml");
    } catch (const evalbench::ParseError& e) {
      return std::string(e.what()).find("c.toml:" + line + ":") != std::string::npos;
    }
    return false;
  };
  CHECK(fails_on_line("a = 1\nb = \"open\n", "2"));
  CHECK(fails_on_line("a = 1\na = 2\n", "2"));
  CHECK(fails_on_line("[t\n", "1"));
  CHECK(fails_on_line("x = [1, 2\n", "1"));
  CHECK(fails_on_line("\n\nx = 1 2\n", "3"));
  CHECK(fails_on_line("novalue\n", "1"));
}

TEST_CASE("parse_config") {
  const RunConfig c = parse_config(kTinyContinual, true);
  CHECK(c.kind == ExperimentKind::continual);
  CHECK(c.seeds == std::vector<std::uint64_t>{0, 1});
  CHECK(c.continual.tasks == 3);
  CHECK(c.methods().size() == 3);

  const RunConfig minimal = parse_config("experiment = \"continual\"\n", true);
  CHECK(minimal.seeds == std::vector<std::uint64_t>{0});

  const std::string unknown = std::string(kTinyContinual) + "fooo = 1\n";
  try {
    parse_config(unknown, true, nullptr, "run.toml");
    FAIL("strict mode accepted an unknown key");
  } catch (const evalbench::ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("fooo") != std::string::npos);
    const auto line = std::count(unknown.begin(), unknown.end(), '\n');
    CHECK(msg.find("run.toml:" + std::to_string(line) + ":") != std::string::npos);
  }
  std::vector<std::string> warnings;
  parse_config(unknown, false, &warnings);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("fooo") != std::string::npos);

  CHECK_THROWS_AS(parse_config("experiment = \"continual\"\nseeds = [1, 2, 1]\n", true), evalbench::InvalidArgument);
  CHECK_THROWS_AS(parse_config("experiment = \"continual\"\nseeds = []\n", true), evalbench::InvalidArgument);
  CHECK_THROWS_AS(parse_config("experiment = \"nope\"\n", true), evalbench::InvalidArgument);
  CHECK_THROWS_AS(parse_config("seeds = [1]\n", true), evalbench::InvalidArgument);
  CHECK_THROWS_AS(parse_config("experiment = \"continual\"\n[continual]\nmethods = [\"vlc\"]\n", true),
                  evalbench::InvalidArgument);
  CHECK_THROWS_AS(parse_config("experiment = \"continual\"\n[model]\nepochs = 1.5\n", true), evalbench::InvalidArgument);
  for (auto k : all_kinds()) CHECK(parse_kind(to_string(k)) == k);
}

TEST_CASE("seed ranges") {
  CHECK(parse_seed_range("0..3") == std::vector<std::uint64_t>{0, 1, 2, 3});
  CHECK(parse_seed_range("7") == std::vector<std::uint64_t>{7});
  CHECK(parse_seed_range("4,2,9") == std::vector<std::uint64_t>{4, 2, 9});
  CHECK_THROWS_AS(parse_seed_range("1,1"), evalbench::InvalidArgument);
  CHECK_THROWS_AS(parse_seed_range("3..1"), evalbench::InvalidArgument);
  CHECK_THROWS_AS(parse_seed_range(""), evalbench::InvalidArgument);
  CHECK_THROWS_AS(parse_seed_range("a..b"), evalbench::InvalidArgument);
}

TEST_CASE("git blob hash") {
  // values printed by `git hash-object`
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("CSV records") {
  const std::vector<ExperimentRecord> rs{{"continual", "vcl", "single_head", 2, "accuracy_task0", 0.1 + 0.2, 3},
                                         {"bias-probe", "uniform", "r_lure", 10, "bias", -1e-300, 0},
                                         {"x", "y", "", -1, "m", 12345678.901234567, 18446744073709551615ULL}};
  std::stringstream ss;
  write_csv(ss, rs);
  CHECK(ss.str().rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  const auto back = parse_csv(ss, "mem");
  CHECK(back == rs);

  ExperimentRecord bad = rs[0];
  bad.value = std::nan("");
  CHECK_THROWS_AS(format_record(bad), evalbench::NumericError);
  bad = rs[0];
  bad.method = "a,b";
  CHECK_THROWS_AS(format_record(bad), evalbench::InvalidArgument);

  std::stringstream wrong_header("experiment,method,step\n");
  CHECK_THROWS_AS(parse_csv(wrong_header, "mem"), evalbench::ParseError);
  std::stringstream short_row(std::string(kCsvHeader) + "\na,b,c,1,m,0.5\n");
  CHECK_THROWS_AS(parse_csv(short_row, "mem"), evalbench::ParseError);
  std::stringstream bad_value(std::string(kCsvHeader) + "\na,b,c,1,m,zz,0\n");
  CHECK_THROWS_AS(parse_csv(bad_value, "mem"), evalbench::ParseError);
}

TEST_CASE("summarize") {
  std::vector<ExperimentRecord> rs{{"e", "m", "p", 0, "acc", 1.0, 0}};
  auto one = summarize(rs);
  REQUIRE(one.size() == 1);
  CHECK(one[0].mean == 1.0);
  CHECK(std::isnan(one[0].se));
  std::stringstream out;
  write_summary(out, one);
  CHECK(out.str() == std::string(kSummaryHeader) + "\ne,m,p,0,acc,1,,,1\n");

  rs.push_back({"e", "m", "p", 0, "acc", 3.0, 1});
  rs.push_back({"e", "m", "p", 1, "acc", 5.0, 0});
  rs.push_back({"e", "m2", "p", 0, "acc", 5.0, 0});
  const auto two = summarize(rs);
  REQUIRE(two.size() == 3);
  CHECK(two[0].mean == 2.0);
  CHECK(two[0].std == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(two[0].se == doctest::Approx(1.0).epsilon(1e-15));
  std::size_t total = 0;
  for (const auto& g : two) total += g.n;
  CHECK(total == rs.size());
}

TEST_CASE("continual run: row counts, determinism, job independence") {
  RunConfig cfg = parse_config(kTinyContinual, true);
  const fs::path a = scratch("cont_a"), b = scratch("cont_b");
  const RunOutcome ra = run(cfg, {a, 1, true, "tiny.toml"});
  REQUIRE(ra.exit_code == 0);
  const RunOutcome rb = run(cfg, {b, 2, true, "tiny.toml"});
  CHECK(slurp(ra.csv) == slurp(rb.csv));

  const auto rows = read_csv(ra.csv);
  // counting oracle: per (seed, method) cell, T(T+1)/2 accuracy cells, T
  // averages, T-1 entropies, and 3 (T-1) gradient rows unless EWC
  const std::size_t T = 3, seeds = 2, methods = 3;
  std::size_t acc = 0;
  for (const auto& r : rows) acc += r.metric.rfind("accuracy_task", 0) == 0;
  CHECK(acc == seeds * methods * T * (T + 1) / 2);
  std::size_t expected = 0;
  for (std::size_t m = 0; m < methods; ++m) {
    const bool ewc = m == 2;
    expected += seeds * (T * (T + 1) / 2 + T + (T - 1) + (ewc ? 0 : 2 * (T - 1)));
  }
  std::size_t ratio_rows = 0;
  for (const auto& r : rows) ratio_rows += r.metric == "gradient_ratio";
  CHECK(rows.size() == expected + ratio_rows);
  CHECK(ratio_rows <= seeds * 2 * (T - 1));

  const auto manifest = nlohmann::json::parse(slurp(ra.manifest));
  CHECK(manifest["status"] == "complete");
  CHECK(manifest["outputs"]["rows"] == rows.size());
  CHECK(manifest["input_hashes"]["config"] == git_blob_sha1(kTinyContinual));
  CHECK(manifest["outputs"]["csv_hash"] == git_blob_sha1(slurp(ra.csv)));
  CHECK(manifest["seeds"].size() == 2);
  CHECK(manifest.contains("wall_clock_seconds"));
}

TEST_CASE("failing cells are flagged") {
  RunConfig cfg = parse_config(
      "experiment = \"continual\"\n[dataset]\nname = \"mnist\"\nimages = \"absent-images\"\nlabels = \"absent-labels\"\n",
      true);
  const fs::path dir = scratch("partial");
  const RunOutcome r = run(cfg, {dir, 1, true, ""});
  CHECK(r.exit_code == 2);
  CHECK_FALSE(r.errors.empty());
  const auto manifest = nlohmann::json::parse(slurp(r.manifest));
  CHECK(manifest["status"] == "partial");
  CHECK(manifest["errors"].size() == r.errors.size());
}

TEST_CASE("probe kinds emit finite records") {
  RunConfig geo = parse_config(
      "experiment = \"geometry-probe\"\n[geometry]\ndepths = [2, 3]\nwidth = 2\nsamples = 20000\n", true);
  const auto g = run_cell(geo, 0, "product");
  std::map<std::string, double> by;
  for (const auto& r : g) by[r.protocol_or_estimator + "/" + r.metric + "/" + std::to_string(r.step)] = r.value;
  CHECK(by.at("analytic/max_off_row_col/2") == 0.0);
  CHECK(by.at("analytic_positive_means/min_cov/3") > 0.0);
  CHECK(by.at("mvg/residual/0") < 1e-10);

  RunConfig soap = parse_config(
      "experiment = \"soapbubble-probe\"\n[dataset]\nname = \"prototype_blobs\"\nn_per_class = 10\n"
      "[soapbubble]\ndims = [3, 50]\nsamples = 500\ngrad_sigmas = [0.5]\ngrad_widths = [16, 8, 10]\nprobes = 3\n",
      true);
  for (const auto& m : soap.methods()) {
    const auto s = run_cell(soap, 1, m);
    CHECK(s.size() > 8);
    for (const auto& r : s)
      if (r.metric == "mode_analytic") CHECK(r.value == std::sqrt(static_cast<double>(r.step - 1)));
  }

  RunConfig bias = parse_config(
      "experiment = \"bias-probe\"\n[dataset]\nname = \"toy_regression\"\n[model]\nlearner = \"linear\"\n"
      "[active]\nproposals = [\"distance_boltzmann\", \"uniform\"]\nm_max = 5\ntrajectories = 50\n",
      true);
  const auto br = run_cell(bias, 0, "uniform");
  CHECK(br.size() == 3 * 5 * 3);
}

TEST_CASE("binary: exit codes and files") {
  const fs::path dir = scratch("bin");
  const fs::path cfg = dir / "run.toml";
  std::ofstream(cfg) << kTinyContinual;
  const fs::path out = dir / "out";
  CHECK(run_binary("continual --config " + cfg.string() + " --out " + out.string() + " --seeds 0..0 --jobs 1 --strict") == 0);
  CHECK(fs::exists(out / "continual.csv"));
  CHECK(fs::exists(out / "manifest.json"));
  const auto rows = read_csv(out / "continual.csv");
  std::set<std::uint64_t> seeds;
  for (const auto& r : rows) seeds.insert(r.seed);
  CHECK(seeds == std::set<std::uint64_t>{0});

  const fs::path out2 = dir / "out2";
  CHECK(run_binary("continual --config " + cfg.string() + " --out " + out2.string() + " --seeds 0..0") == 0);
  CHECK(slurp(out / "continual.csv") == slurp(out2 / "continual.csv"));

  CHECK(run_binary("summarize " + (out / "continual.csv").string()) == 0);

  const fs::path bad = dir / "bad.toml";
  std::ofstream(bad) << kTinyContinual << "fooo = 2\n";
  const fs::path out3 = dir / "out3";
  CHECK(run_binary("continual --config " + bad.string() + " --out " + out3.string() + " --strict") == 1);
  CHECK_FALSE(fs::exists(out3));

  const fs::path empty = dir / "empty.toml";
  std::ofstream(empty) << "experiment = \"continual\"\nseeds = []\n";
  CHECK(run_binary("continual --config " + empty.string() + " --out " + out3.string()) == 1);
  CHECK_FALSE(fs::exists(out3));

  CHECK(run_binary("active-learn --config " + cfg.string() + " --out " + out3.string()) == 1);  // kind mismatch
  CHECK(run_binary("continual --config " + cfg.string()) == 1);                               // missing --out

  const fs::path idx = dir / "idx.toml";
  std::ofstream(idx) << "experiment = \"continual\"\n[dataset]\nname = \"mnist\"\nimages = \"nope\"\nlabels = \"nope\"\n";
  CHECK(run_binary("continual --config " + idx.string() + " --out " + (dir / "out4").string()) == 2);
  CHECK(nlohmann::json::parse(slurp(dir / "out4" / "manifest.json"))["status"] == "partial");
}
