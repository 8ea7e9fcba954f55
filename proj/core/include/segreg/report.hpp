#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace segreg {

struct ReportRow {
  std::string case_id;
  std::string mode;
  double dsc_whole = 0.0;
  double dsc_base = 0.0;
  double dsc_mid = 0.0;
  double dsc_apex = 0.0;
  std::optional<double> tre_mm;
  double jac_grad_x100 = 0.0;
  int iterations = 0;
  double wall_time_s = 0.0;
};

struct RunReport {
  std::vector<ReportRow> rows;
};

struct ColumnSummary {
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1); 0 for n < 2
  int count = 0;
};

ColumnSummary summarize(std::vector<double> values);

/// CSV with a fixed header, one line per row, then mean / median / sd
/// lines per mode (case_id column holds the statistic name). Numbers are
/// printed with 6 significant digits; a missing TRE is written as "nan"
/// and left out of the summaries.
std::string format_report(const RunReport& report);
void write_report(const RunReport& report, const std::filesystem::path& path);

}  // namespace segreg
