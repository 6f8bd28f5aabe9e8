#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evalbench/cli/config.hpp"
#include "evalbench/cli/records.hpp"
#include "evalbench/cli/runner.hpp"
#include "evalbench/numcore/error.hpp"

namespace cli = evalbench::cli;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

int summarize(const std::vector<std::string>& paths) {
  std::vector<cli::ExperimentRecord> all;
  for (const auto& p : paths) {
    auto part = cli::read_csv(p);
    all.insert(all.end(), part.begin(), part.end());
  }
  cli::write_summary(std::cout, cli::summarize(all));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluation harness for mean-field BNNs, continual learning and active learning"};
  app.require_subcommand(1);

  std::string config_path, out_dir, seeds;
  std::size_t jobs = 1;
  bool strict = false;
  std::vector<CLI::App*> kind_cmds;
  for (auto kind : cli::all_kinds()) {
    auto* sub = app.add_subcommand(cli::to_string(kind), "run a " + cli::to_string(kind) + " experiment");
    sub->add_option("--config", config_path, "config file (TOML subset)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seeds", seeds, "seed list: 0..k, a,b,c or n; overrides the config");
    sub->add_option("--jobs", jobs, "concurrent (seed, method) cells")->check(CLI::PositiveNumber);
    sub->add_flag("--strict", strict, "unknown config keys are errors");
    kind_cmds.push_back(sub);
  }
  std::vector<std::string> csvs;
  auto* summ = app.add_subcommand("summarize", "mean, std, s.e. and n per group");
  summ->add_option("csv", csvs, "result CSVs")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (summ->parsed()) return summarize(csvs);
  } catch (const evalbench::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }

  cli::RunConfig cfg;
  const CLI::App* chosen = app.get_subcommands().front();
  try {
    std::vector<std::string> warnings;
    cfg = cli::load_config(config_path, strict, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    if (cli::to_string(cfg.kind) != chosen->get_name())
      throw evalbench::InvalidArgument("config declares experiment '" + cli::to_string(cfg.kind) + "' but the command is '" +
                                       chosen->get_name() + "'");
    if (!seeds.empty()) cfg.seeds = cli::parse_seed_range(seeds);
    if (cfg.seeds.empty()) throw evalbench::InvalidArgument("empty seed list");
  } catch (const evalbench::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    const auto outcome = cli::run(cfg, {out_dir, jobs, strict, config_path});
    for (const auto& e : outcome.errors) std::cerr << "cell failed: " << e << "\n";
    std::cerr << "wrote " << outcome.rows << " rows to " << outcome.csv.string() << "\n";
    return outcome.exit_code == 0 ? kOk : kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
