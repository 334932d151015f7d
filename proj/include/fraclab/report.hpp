#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fraclab/linalg.hpp"

namespace fraclab {

struct ReportRecord {
  std::size_t index = 0;
  Point x;
  std::optional<double> value;
  std::optional<double> lo;
  std::optional<double> hi;
  std::string verdict;
  std::string witness_kind;  ///< frame | subspace | certificate | empty
  std::vector<Vector> witness;
  std::string detail;
};

struct Report {
  std::string command;  ///< command echo
  std::uint64_t seed = 0;
  std::vector<ReportRecord> records;
  std::vector<std::pair<std::string, std::string>> summary;  ///< ordered key/value pairs
  std::optional<double> wall_time;  ///< only with --timing, so default reports stay byte-identical

  void add_summary(const std::string& key, const std::string& value) { summary.emplace_back(key, value); }
};

enum class ReportFormat { Text, Json, Csv };
ReportFormat parse_format(const std::string& name);

/// Shortest round-trip decimal form ("inf", "-inf", "nan" for non-finite values).
std::string format_number(double v);

std::string render_report(const Report& report, ReportFormat format);
/// Writes to path, or to stdout when path is empty or "-". Throws IoError.
void emit_report(const Report& report, ReportFormat format, const std::string& path);
Report report_from_json(const std::string& text);

}  // namespace fraclab
