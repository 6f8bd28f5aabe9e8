#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace evalbench::cli {

/// Scalar or one-level array value from the config file.
struct Value {
  using Scalar = std::variant<bool, std::int64_t, double, std::string>;
  std::variant<bool, std::int64_t, double, std::string, std::vector<Scalar>> v;
  std::size_t line = 0;
};

/// Flat key table: "section.key" -> value, in file order of definition.
/// Grammar: [table] headers, key = value, '#' comments, basic strings,
/// integers, floats, true/false and single-line arrays of scalars.
class Document {
 public:
  static Document parse(const std::string& text, const std::string& source = "<config>");
  static Document load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const Value& at(const std::string& key) const;
  std::vector<std::string> keys() const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;
  std::vector<std::int64_t> get_ints(const std::string& key, const std::vector<std::int64_t>& fallback) const;
  std::vector<std::size_t> get_sizes(const std::string& key, const std::vector<std::size_t>& fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  /// Keys never read through a getter, in file order.
  std::vector<std::string> unused() const;
  const std::string& source() const { return source_; }

 private:
  [[noreturn]] void type_error(const std::string& key, const char* want) const;
  std::map<std::string, Value> values_;
  std::vector<std::string> order_;
  mutable std::set<std::string> used_;
  std::string source_;
};

enum class ExperimentKind {
  continual,
  active_learn,
  active_test,
  bias_probe,
  ofb_probe,
  geometry_probe,
  soapbubble_probe
};

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& name);
std::vector<ExperimentKind> all_kinds();

struct DatasetSpec {
  std::string name = "prototype_blobs";
  std::vector<std::size_t> clusters{5, 48, 48};  // toy_regression
  std::size_t test_scale = 10;                   // toy test set = clusters * test_scale
  std::size_t classes = 10;
  std::size_t n_per_class = 100;
  std::size_t test_per_class = 50;
  std::size_t dim = 16;
  std::size_t active = 8;  // prototype_blobs
  double separation = 8.0;
  std::uint64_t prototype_seed = 1000;  // offset by the run seed
  double noise = 0.1;                   // two_moons
  std::size_t train_size = 200;         // two_moons
  std::size_t test_size = 200;          // two_moons
  std::string images, labels, test_images, test_labels;  // mnist, under EVALBENCH_DATA_DIR
  bool normalize = true;
};

struct ModelSpec {
  std::string learner = "bnn";  // bnn | linear
  std::vector<std::size_t> hidden{32, 32};
  std::string posterior = "gaussian";
  double truncation = 2.0;
  double dropout = 0.1;
  std::string activation = "relu";
  double prior_sigma = 1.0;
  double rho_init = -3.0;
  double sigma_obs = 0.1;
  std::size_t epochs = 40;
  std::size_t batch_size = 64;
  double learning_rate = 3e-3;
  std::size_t train_samples = 1;
  std::size_t test_samples = 10;
  std::size_t acquisition_samples = 20;
  double kl_scale = 1.0;
};

struct ContinualSpec {
  std::string stream = "split";
  std::size_t tasks = 5;
  std::vector<std::string> methods{"vcl", "vcl_coreset", "coreset_only", "ewc"};
  std::vector<std::string> protocols{"single_head"};
  std::size_t coreset_size = 40;
  double ewc_lambda = 100.0;
  std::size_t finetune_epochs = 20;
  std::size_t probes = 10;
};

struct ActiveSpec {
  std::vector<std::string> proposals{"distance_boltzmann"};
  std::vector<std::string> estimators{"r_tilde", "r_pure", "r_lure"};
  double temperature = 1e4;
  double epsilon = 0.1;
  double beta = 1.0;
  double floor = 0.1;  // proportional proposals
  std::size_t m_max = 20;
  std::size_t start_points = 10;
  std::size_t retrain_every = 3;
  std::size_t checkpoint_every = 5;
  std::string scoring_estimator = "r_tilde";
  std::size_t trajectories = 200;  // bias / ofb / active-test trials
};

struct GeometrySpec {
  std::vector<std::size_t> depths{2, 3, 4};
  std::size_t width = 3;
  double std_scale = 0.5;
  std::size_t samples = 100000;
};

struct SoapSpec {
  std::vector<std::size_t> dims{4, 64, 4096};
  double sigma = 1.0;
  std::size_t samples = 2000;
  std::vector<double> grad_sigmas{0.1, 0.2, 0.3, 0.5, 1.0};
  std::vector<std::size_t> grad_widths{16, 96, 96, 10};
  std::size_t probes = 30;
};

struct RunConfig {
  ExperimentKind kind = ExperimentKind::continual;
  std::vector<std::uint64_t> seeds;
  DatasetSpec dataset;
  ModelSpec model;
  ContinualSpec continual;
  ActiveSpec active;
  GeometrySpec geometry;
  SoapSpec soap;
  std::string text;  // verbatim config, echoed into the manifest

  /// Names of methods the run fans out over (one cell per seed and method).
  std::vector<std::string> methods() const;
};

/// Reads and validates a config. Unknown keys are an error in strict mode
/// and are returned in `warnings` otherwise. Throws ParseError (bad syntax,
/// unknown keys) or InvalidArgument (bad values), naming key and line.
RunConfig parse_config(const std::string& text, bool strict, std::vector<std::string>* warnings = nullptr,
                       const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path, bool strict, std::vector<std::string>* warnings = nullptr);

/// "0..k" (inclusive), "a,b,c" or a single integer. Rejects duplicates.
std::vector<std::uint64_t> parse_seed_range(const std::string& spec);

}  // namespace evalbench::cli
