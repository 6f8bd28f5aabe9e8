#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace evalbench::cli {

/// One CSV row: experiment, method, protocol_or_estimator, step, metric,
/// value, seed.
struct ExperimentRecord {
  std::string experiment;
  std::string method;
  std::string protocol_or_estimator;
  std::int64_t step = 0;
  std::string metric;
  double value = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

inline constexpr const char* kCsvHeader = "experiment,method,protocol_or_estimator,step,metric,value,seed";

/// Values are written with 17 significant digits so they read back exactly.
/// Throws NumericError on a non-finite value.
std::string format_record(const ExperimentRecord& r);
void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
void write_csv(const std::filesystem::path& path, const std::vector<ExperimentRecord>& records);

/// Throws ParseError on a header or row that does not match the schema.
std::vector<ExperimentRecord> read_csv(const std::filesystem::path& path);
std::vector<ExperimentRecord> parse_csv(std::istream& in, const std::string& source);

/// mean, std, s.e. and n of `value` per (experiment, method, step, metric),
/// groups in first-seen order. std is NaN for n = 1, s.e. likewise.
struct SummaryRow {
  std::string experiment, method, protocol_or_estimator;
  std::int64_t step = 0;
  std::string metric;
  double mean = 0.0, std = 0.0, se = 0.0;
  std::size_t n = 0;
};
std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records);

inline constexpr const char* kSummaryHeader = "experiment,method,protocol_or_estimator,step,metric,mean,std,se,n";
/// Undefined std / s.e. are written as empty fields.
void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace evalbench::cli
