#include "evalbench/cli/records.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "evalbench/numcore/error.hpp"
#include "evalbench/stats/stats.hpp"

namespace evalbench::cli {

namespace {

void check_field(const std::string& f, const char* name) {
  if (f.find_first_of(",\"\n\r") != std::string::npos)
    throw InvalidArgument(std::string("CSV field ") + name + " contains a separator: '" + f + "'");
}

std::string fmt_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string format_record(const ExperimentRecord& r) {
  if (!std::isfinite(r.value))
    throw NumericError("non-finite value for " + r.experiment + "/" + r.method + "/" + r.metric);
  check_field(r.experiment, "experiment");
  check_field(r.method, "method");
  check_field(r.protocol_or_estimator, "protocol_or_estimator");
  check_field(r.metric, "metric");
  return r.experiment + "," + r.method + "," + r.protocol_or_estimator + "," + std::to_string(r.step) + "," + r.metric +
         "," + fmt_double(r.value) + "," + std::to_string(r.seed);
}

void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << kCsvHeader << "\n";
  for (const auto& r : records) out << format_record(r) << "\n";
}

void write_csv(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + path.string());
  write_csv(f, records);
}

std::vector<ExperimentRecord> parse_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ParseError(source + ": header does not match the record schema");
  std::vector<ExperimentRecord> out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string part;
    while (std::getline(ss, part, ',')) f.push_back(part);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    const std::string where = source + ":" + std::to_string(n) + ": ";
    if (f.size() != 7) throw ParseError(where + "expected 7 fields, got " + std::to_string(f.size()));
    ExperimentRecord r{f[0], f[1], f[2], 0, f[4], 0.0, 0};
    auto parse = [&](const std::string& s, auto& v, const char* what) {
      auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError(where + "bad " + what + " '" + s + "'");
    };
    parse(f[3], r.step, "step");
    parse(f[5], r.value, "value");
    parse(f[6], r.seed, "seed");
    if (!std::isfinite(r.value)) throw ParseError(where + "non-finite value");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open " + path.string());
  return parse_csv(f, path.string());
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records) {
  using Key = std::tuple<std::string, std::string, std::string, std::int64_t, std::string>;
  std::map<Key, std::size_t> index;
  std::vector<Key> keys;
  std::vector<std::vector<double>> values;
  for (const auto& r : records) {
    Key k{r.experiment, r.method, r.protocol_or_estimator, r.step, r.metric};
    auto [it, fresh] = index.emplace(k, keys.size());
    if (fresh) {
      keys.push_back(k);
      values.emplace_back();
    }
    values[it->second].push_back(r.value);
  }
  std::vector<SummaryRow> out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t g = 0; g < keys.size(); ++g) {
    const auto& [e, m, p, step, metric] = keys[g];
    const auto s = stats::summarize(values[g]);
    const bool single = s.n < 2;
    out.push_back({e, m, p, step, metric, s.mean, single ? nan : s.std, single ? nan : s.se, s.n});
  }
  return out;
}

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << "\n";
  auto opt = [](double v) { return std::isfinite(v) ? fmt_double(v) : std::string(); };
  for (const auto& r : rows)
    out << r.experiment << "," << r.method << "," << r.protocol_or_estimator << "," << r.step << "," << r.metric << ","
        << fmt_double(r.mean) << "," << opt(r.std) << "," << opt(r.se) << "," << r.n << "\n";
}

}  // namespace evalbench::cli
