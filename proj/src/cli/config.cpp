#include "evalbench/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "evalbench/numcore/error.hpp"

namespace evalbench::cli {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool bare_key(const std::string& k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; });
}

class LineParser {
 public:
  LineParser(std::string_view text, std::size_t line, const std::string& source)
      : s_(text), line_(line), source_(source) {}

  Value value() {
    Value out;
    out.line = line_;
    skip_ws();
    if (peek() == '[') {
      ++pos_;
      std::vector<Value::Scalar> items;
      while (true) {
        skip_ws();
        if (peek() == ']') {
          ++pos_;
          break;
        }
        items.push_back(scalar());
        skip_ws();
        if (peek() == ',') {
          ++pos_;
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
      out.v = std::move(items);
    } else {
      std::visit([&](auto&& x) { out.v = x; }, scalar());
    }
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] != '#') fail("trailing characters after value");
    return out;
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(source_ + ":" + std::to_string(line_) + ": " + what);
  }

  Value::Scalar scalar() {
    skip_ws();
    if (peek() == '"') return string();
    std::size_t end = pos_;
    while (end < s_.size() && s_[end] != ',' && s_[end] != ']' && s_[end] != '#' && s_[end] != ' ' && s_[end] != '\t')
      ++end;
    const std::string tok(s_.substr(pos_, end - pos_));
    pos_ = end;
    if (tok.empty()) fail("missing value");
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string digits;
    for (char c : tok)
      if (c != '_') digits.push_back(c);
    const bool is_float = digits.find_first_of(".eE") != std::string::npos || digits == "inf" || digits == "+inf" ||
                          digits == "-inf";
    const char* b = digits.data() + (digits[0] == '+' ? 1 : 0);
    const char* e = digits.data() + digits.size();
    if (!is_float) {
      std::int64_t i = 0;
      auto r = std::from_chars(b, e, i);
      if (r.ec != std::errc() || r.ptr != e) fail("cannot parse value '" + tok + "'");
      return i;
    }
    double d = 0.0;
    auto r = std::from_chars(b, e, d);
    if (r.ec != std::errc() || r.ptr != e) fail("cannot parse value '" + tok + "'");
    return d;
  }

  std::string string() {
    ++pos_;
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated escape");
        const char n = s_[pos_++];
        switch (n) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: fail(std::string("unsupported escape \\") + n);
        }
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
  const std::string& source_;
};

double as_double(const Value::Scalar& s, bool& ok) {
  ok = true;
  if (auto* d = std::get_if<double>(&s)) return *d;
  if (auto* i = std::get_if<std::int64_t>(&s)) return static_cast<double>(*i);
  ok = false;
  return 0.0;
}

}  // namespace

Document Document::parse(const std::string& text, const std::string& source) {
  Document doc;
  doc.source_ = source;
  std::istringstream in(text);
  std::string raw, table;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string t = trim(raw);
    if (t.empty() || t[0] == '#') continue;
    const std::string where = source + ":" + std::to_string(line) + ": ";
    if (t[0] == '[') {
      const auto close = t.find(']');
      if (close == std::string::npos) throw ParseError(where + "unterminated table header");
      const std::string rest = trim(std::string_view(t).substr(close + 1));
      if (!rest.empty() && rest[0] != '#') throw ParseError(where + "trailing characters after table header");
      table = trim(std::string_view(t).substr(1, close - 1));
      std::stringstream parts(table);
      std::string part;
      while (std::getline(parts, part, '.'))
        if (!bare_key(part)) throw ParseError(where + "bad table name '" + table + "'");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(where + "expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (!bare_key(key)) throw ParseError(where + "bad key '" + key + "'");
    const std::string full = table.empty() ? key : table + "." + key;
    if (doc.values_.count(full)) throw ParseError(where + "duplicate key '" + full + "'");
    LineParser p(std::string_view(t).substr(eq + 1), line, source);
    doc.values_[full] = p.value();
    doc.order_.push_back(full);
  }
  return doc;
}

Document Document::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path.string());
}

const Value& Document::at(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw InvalidArgument("missing key '" + key + "'");
  used_.insert(key);
  return it->second;
}

std::vector<std::string> Document::keys() const { return order_; }

std::vector<std::string> Document::unused() const {
  std::vector<std::string> out;
  for (const auto& k : order_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

void Document::type_error(const std::string& key, const char* want) const {
  throw InvalidArgument(source_ + ":" + std::to_string(values_.at(key).line) + ": key '" + key + "' must be " + want);
}

std::string Document::get_string(const std::string& key, const std::string& fallback) const {
  if (!has(key)) return fallback;
  const auto* s = std::get_if<std::string>(&at(key).v);
  if (!s) type_error(key, "a string");
  return *s;
}

std::int64_t Document::get_int(const std::string& key, std::int64_t fallback) const {
  if (!has(key)) return fallback;
  const auto* i = std::get_if<std::int64_t>(&at(key).v);
  if (!i) type_error(key, "an integer");
  return *i;
}

std::size_t Document::get_size(const std::string& key, std::size_t fallback) const {
  const std::int64_t v = get_int(key, static_cast<std::int64_t>(fallback));
  if (v < 0) type_error(key, "a non-negative integer");
  return static_cast<std::size_t>(v);
}

double Document::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const Value& v = at(key);
  if (auto* d = std::get_if<double>(&v.v)) return *d;
  if (auto* i = std::get_if<std::int64_t>(&v.v)) return static_cast<double>(*i);
  type_error(key, "a number");
}

bool Document::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto* b = std::get_if<bool>(&at(key).v);
  if (!b) type_error(key, "true or false");
  return *b;
}

std::vector<std::string> Document::get_strings(const std::string& key, const std::vector<std::string>& fallback) const {
  if (!has(key)) return fallback;
  const auto* arr = std::get_if<std::vector<Value::Scalar>>(&at(key).v);
  if (!arr) type_error(key, "an array of strings");
  std::vector<std::string> out;
  for (const auto& s : *arr) {
    const auto* str = std::get_if<std::string>(&s);
    if (!str) type_error(key, "an array of strings");
    out.push_back(*str);
  }
  return out;
}

std::vector<std::int64_t> Document::get_ints(const std::string& key, const std::vector<std::int64_t>& fallback) const {
  if (!has(key)) return fallback;
  const auto* arr = std::get_if<std::vector<Value::Scalar>>(&at(key).v);
  if (!arr) type_error(key, "an array of integers");
  std::vector<std::int64_t> out;
  for (const auto& s : *arr) {
    const auto* i = std::get_if<std::int64_t>(&s);
    if (!i) type_error(key, "an array of integers");
    out.push_back(*i);
  }
  return out;
}

std::vector<std::size_t> Document::get_sizes(const std::string& key, const std::vector<std::size_t>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::size_t> out;
  for (auto i : get_ints(key, {})) {
    if (i < 0) type_error(key, "an array of non-negative integers");
    out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

std::vector<double> Document::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  const auto* arr = std::get_if<std::vector<Value::Scalar>>(&at(key).v);
  if (!arr) type_error(key, "an array of numbers");
  std::vector<double> out;
  for (const auto& s : *arr) {
    bool ok = false;
    const double d = as_double(s, ok);
    if (!ok) type_error(key, "an array of numbers");
    out.push_back(d);
  }
  return out;
}

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::continual: return "continual";
    case ExperimentKind::active_learn: return "active-learn";
    case ExperimentKind::active_test: return "active-test";
    case ExperimentKind::bias_probe: return "bias-probe";
    case ExperimentKind::ofb_probe: return "ofb-probe";
    case ExperimentKind::geometry_probe: return "geometry-probe";
    case ExperimentKind::soapbubble_probe: return "soapbubble-probe";
  }
  return "?";
}

std::vector<ExperimentKind> all_kinds() {
  return {ExperimentKind::continual,  ExperimentKind::active_learn,   ExperimentKind::active_test,
          ExperimentKind::bias_probe, ExperimentKind::ofb_probe,      ExperimentKind::geometry_probe,
          ExperimentKind::soapbubble_probe};
}

ExperimentKind parse_kind(const std::string& name) {
  for (auto k : all_kinds())
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown experiment kind '" + name + "'");
}

std::vector<std::string> RunConfig::methods() const {
  switch (kind) {
    case ExperimentKind::continual: {
      std::vector<std::string> out;
      for (const auto& m : continual.methods)
        for (const auto& p : continual.protocols) out.push_back(m + "/" + p);
      return out;
    }
    case ExperimentKind::active_learn:
    case ExperimentKind::active_test:
    case ExperimentKind::bias_probe: return active.proposals;
    case ExperimentKind::ofb_probe: return {"bald_boltzmann"};
    case ExperimentKind::geometry_probe: return {"product"};
    case ExperimentKind::soapbubble_probe: return {"gaussian", "radial"};
  }
  return {};
}

namespace {

void check_names(const std::vector<std::string>& names, const std::vector<std::string>& allowed, const char* what) {
  if (names.empty()) throw InvalidArgument(std::string(what) + " list is empty");
  for (const auto& n : names)
    if (std::find(allowed.begin(), allowed.end(), n) == allowed.end())
      throw InvalidArgument(std::string("unknown ") + what + " '" + n + "'");
  std::set<std::string> seen(names.begin(), names.end());
  if (seen.size() != names.size()) throw InvalidArgument(std::string("duplicate entry in ") + what + " list");
}

}  // namespace

RunConfig parse_config(const std::string& text, bool strict, std::vector<std::string>* warnings,
                       const std::string& source) {
  const Document doc = Document::parse(text, source);
  RunConfig c;
  c.text = text;
  if (!doc.has("experiment")) throw InvalidArgument(source + ": missing key 'experiment'");
  c.kind = parse_kind(doc.get_string("experiment", ""));

  if (doc.has("seeds")) {
    for (auto s : doc.get_ints("seeds", {})) {
      if (s < 0) throw InvalidArgument("seeds must be non-negative");
      c.seeds.push_back(static_cast<std::uint64_t>(s));
    }
    if (c.seeds.empty()) throw InvalidArgument(source + ": empty seed list");
    std::set<std::uint64_t> seen(c.seeds.begin(), c.seeds.end());
    if (seen.size() != c.seeds.size())
      throw InvalidArgument(source + ":" + std::to_string(doc.at("seeds").line) + ": duplicate seed entries");
  } else {
    c.seeds = {0};
  }

  auto& d = c.dataset;
  d.name = doc.get_string("dataset.name", d.name);
  d.clusters = doc.get_sizes("dataset.clusters", d.clusters);
  d.test_scale = doc.get_size("dataset.test_scale", d.test_scale);
  d.classes = doc.get_size("dataset.classes", d.classes);
  d.n_per_class = doc.get_size("dataset.n_per_class", d.n_per_class);
  d.test_per_class = doc.get_size("dataset.test_per_class", d.test_per_class);
  d.dim = doc.get_size("dataset.dim", d.dim);
  d.active = doc.get_size("dataset.active", d.active);
  d.separation = doc.get_double("dataset.separation", d.separation);
  d.prototype_seed = static_cast<std::uint64_t>(doc.get_size("dataset.prototype_seed", d.prototype_seed));
  d.noise = doc.get_double("dataset.noise", d.noise);
  d.train_size = doc.get_size("dataset.train_size", d.train_size);
  d.test_size = doc.get_size("dataset.test_size", d.test_size);
  d.images = doc.get_string("dataset.images", d.images);
  d.labels = doc.get_string("dataset.labels", d.labels);
  d.test_images = doc.get_string("dataset.test_images", d.test_images);
  d.test_labels = doc.get_string("dataset.test_labels", d.test_labels);
  d.normalize = doc.get_bool("dataset.normalize", d.normalize);
  check_names({d.name}, {"toy_regression", "blobs", "prototype_blobs", "two_moons", "mnist"}, "dataset");

  auto& m = c.model;
  m.learner = doc.get_string("model.learner", m.learner);
  m.hidden = doc.get_sizes("model.hidden", m.hidden);
  m.posterior = doc.get_string("model.posterior", m.posterior);
  m.truncation = doc.get_double("model.truncation", m.truncation);
  m.dropout = doc.get_double("model.dropout", m.dropout);
  m.activation = doc.get_string("model.activation", m.activation);
  m.prior_sigma = doc.get_double("model.prior_sigma", m.prior_sigma);
  m.rho_init = doc.get_double("model.rho_init", m.rho_init);
  m.sigma_obs = doc.get_double("model.sigma_obs", m.sigma_obs);
  m.epochs = doc.get_size("model.epochs", m.epochs);
  m.batch_size = doc.get_size("model.batch_size", m.batch_size);
  m.learning_rate = doc.get_double("model.learning_rate", m.learning_rate);
  m.train_samples = doc.get_size("model.train_samples", m.train_samples);
  m.test_samples = doc.get_size("model.test_samples", m.test_samples);
  m.acquisition_samples = doc.get_size("model.acquisition_samples", m.acquisition_samples);
  m.kl_scale = doc.get_double("model.kl_scale", m.kl_scale);
  check_names({m.learner}, {"bnn", "linear"}, "learner");
  check_names({m.posterior}, {"gaussian", "radial", "truncated", "mc_dropout"}, "posterior");
  check_names({m.activation}, {"relu", "leaky_relu", "identity"}, "activation");
  if (m.prior_sigma <= 0.0 || m.learning_rate <= 0.0 || m.sigma_obs <= 0.0)
    throw InvalidArgument("model: prior_sigma, learning_rate and sigma_obs must be positive");

  auto& cs = c.continual;
  cs.stream = doc.get_string("continual.stream", cs.stream);
  cs.tasks = doc.get_size("continual.tasks", cs.tasks);
  cs.methods = doc.get_strings("continual.methods", cs.methods);
  cs.protocols = doc.get_strings("continual.protocols", cs.protocols);
  cs.coreset_size = doc.get_size("continual.coreset_size", cs.coreset_size);
  cs.ewc_lambda = doc.get_double("continual.ewc_lambda", cs.ewc_lambda);
  cs.finetune_epochs = doc.get_size("continual.finetune_epochs", cs.finetune_epochs);
  cs.probes = doc.get_size("continual.probes", cs.probes);
  check_names({cs.stream}, {"split", "permuted"}, "stream");
  check_names(cs.methods, {"vcl", "vcl_coreset", "coreset_only", "ewc"}, "method");
  check_names(cs.protocols, {"single_head", "multi_head", "test_time_knowledge"}, "protocol");

  auto& a = c.active;
  a.proposals = doc.get_strings("active.proposals", a.proposals);
  a.estimators = doc.get_strings("active.estimators", a.estimators);
  a.temperature = doc.get_double("active.temperature", a.temperature);
  a.epsilon = doc.get_double("active.epsilon", a.epsilon);
  a.beta = doc.get_double("active.beta", a.beta);
  a.floor = doc.get_double("active.floor", a.floor);
  a.m_max = doc.get_size("active.m_max", a.m_max);
  a.start_points = doc.get_size("active.start_points", a.start_points);
  a.retrain_every = doc.get_size("active.retrain_every", a.retrain_every);
  a.checkpoint_every = doc.get_size("active.checkpoint_every", a.checkpoint_every);
  a.scoring_estimator = doc.get_string("active.scoring_estimator", a.scoring_estimator);
  a.trajectories = doc.get_size("active.trajectories", a.trajectories);
  check_names(a.estimators, {"r_tilde", "r_pure", "r_lure", "r_full"}, "estimator");
  if (c.kind == ExperimentKind::active_learn)
    check_names(a.proposals, {"uniform", "boltzmann", "bald", "epsilon_greedy", "distance_boltzmann"}, "proposal");
  if (c.kind == ExperimentKind::active_test)
    check_names(a.proposals, {"bald", "shuffled", "uniform"}, "proposal");
  if (c.kind == ExperimentKind::bias_probe)
    check_names(a.proposals, {"uniform", "bald", "epsilon_greedy", "distance_boltzmann", "loss_boltzmann"}, "proposal");
  if (a.temperature <= 0.0 || a.beta < 0.0 || a.epsilon < 0.0 || a.epsilon > 1.0 || a.floor < 0.0)
    throw InvalidArgument("active: temperature > 0, beta >= 0, 0 <= epsilon <= 1 and floor >= 0 required");
  if (a.trajectories == 0) throw InvalidArgument("active.trajectories must be positive");

  auto& g = c.geometry;
  g.depths = doc.get_sizes("geometry.depths", g.depths);
  g.width = doc.get_size("geometry.width", g.width);
  g.std_scale = doc.get_double("geometry.std_scale", g.std_scale);
  g.samples = doc.get_size("geometry.samples", g.samples);
  for (auto depth : g.depths)
    if (depth < 2) throw InvalidArgument("geometry.depths entries must be >= 2");
  if (g.width == 0 || g.samples < 2) throw InvalidArgument("geometry: width >= 1 and samples >= 2 required");

  auto& s = c.soap;
  s.dims = doc.get_sizes("soapbubble.dims", s.dims);
  s.sigma = doc.get_double("soapbubble.sigma", s.sigma);
  s.samples = doc.get_size("soapbubble.samples", s.samples);
  s.grad_sigmas = doc.get_doubles("soapbubble.grad_sigmas", s.grad_sigmas);
  s.grad_widths = doc.get_sizes("soapbubble.grad_widths", s.grad_widths);
  s.probes = doc.get_size("soapbubble.probes", s.probes);
  for (auto dim : s.dims)
    if (dim < 2) throw InvalidArgument("soapbubble.dims entries must be >= 2");
  if (s.sigma <= 0.0 || s.samples < 2) throw InvalidArgument("soapbubble: sigma > 0 and samples >= 2 required");

  const auto unused = doc.unused();
  for (const auto& k : unused) {
    const std::string msg = source + ":" + std::to_string(doc.at(k).line) + ": unknown key '" + k + "'";
    if (strict) throw ParseError(msg);
    if (warnings) warnings->push_back(msg);
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path, bool strict, std::vector<std::string>* warnings) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), strict, warnings, path.string());
}

std::vector<std::uint64_t> parse_seed_range(const std::string& spec) {
  auto number = [&](const std::string& s) {
    std::uint64_t v = 0;
    const std::string t = trim(s);
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
      throw InvalidArgument("bad seed specification '" + spec + "'");
    return v;
  };
  std::vector<std::uint64_t> out;
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const auto lo = number(spec.substr(0, dots)), hi = number(spec.substr(dots + 2));
    if (hi < lo) throw InvalidArgument("empty seed range '" + spec + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  } else {
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(number(part));
  }
  if (out.empty()) throw InvalidArgument("empty seed list");
  std::set<std::uint64_t> seen(out.begin(), out.end());
  if (seen.size() != out.size()) throw InvalidArgument("duplicate seed entries in '" + spec + "'");
  return out;
}

}  // namespace evalbench::cli
