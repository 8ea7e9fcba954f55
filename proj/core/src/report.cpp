#include "segreg/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "segreg/error.hpp"

namespace segreg {

namespace {

std::string fmt6(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

constexpr const char* kHeader =
    "case_id,mode,dsc_whole,dsc_base,dsc_mid,dsc_apex,tre_mm,jac_grad_x100,iterations,wall_time_s";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

ColumnSummary summarize(std::vector<double> values) {
  ColumnSummary s;
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }), values.end());
  s.count = static_cast<int>(values.size());
  if (values.empty()) {
    s.mean = s.median = s.sd = std::nan("");
    return s;
  }
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  s.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  if (n >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

std::string format_report(const RunReport& report) {
  std::string out = std::string(kHeader) + "\n";
  std::map<std::string, std::vector<const ReportRow*>> by_mode;
  for (const ReportRow& r : report.rows) {
    out += csv_field(r.case_id) + "," + csv_field(r.mode) + "," + fmt6(r.dsc_whole) + "," + fmt6(r.dsc_base) + "," +
           fmt6(r.dsc_mid) + "," + fmt6(r.dsc_apex) + "," + fmt6(r.tre_mm.value_or(std::nan(""))) + "," +
           fmt6(r.jac_grad_x100) + "," + std::to_string(r.iterations) + "," + fmt6(r.wall_time_s) + "\n";
    by_mode[r.mode].push_back(&r);
  }
  for (const auto& [mode, rows] : by_mode) {
    auto column = [&rows](auto getter) {
      std::vector<double> v;
      for (const ReportRow* r : rows) v.push_back(getter(*r));
      return summarize(std::move(v));
    };
    const ColumnSummary cols[] = {
        column([](const ReportRow& r) { return r.dsc_whole; }),
        column([](const ReportRow& r) { return r.dsc_base; }),
        column([](const ReportRow& r) { return r.dsc_mid; }),
        column([](const ReportRow& r) { return r.dsc_apex; }),
        column([](const ReportRow& r) { return r.tre_mm.value_or(std::nan("")); }),
        column([](const ReportRow& r) { return r.jac_grad_x100; }),
        column([](const ReportRow& r) { return static_cast<double>(r.iterations); }),
        column([](const ReportRow& r) { return r.wall_time_s; }),
    };
    const std::pair<const char*, double ColumnSummary::*> stats[] = {
        {"mean", &ColumnSummary::mean}, {"median", &ColumnSummary::median}, {"sd", &ColumnSummary::sd}};
    for (const auto& [name, member] : stats) {
      out += std::string(name) + "," + csv_field(mode);
      for (const ColumnSummary& c : cols) out += "," + fmt6(c.*member);
      out += "\n";
    }
  }
  return out;
}

void write_report(const RunReport& report, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write report " + path.string());
  const std::string text = format_report(report);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw Error("short write to " + path.string());
}

}  // namespace segreg
