#pragma once

// Report rows and their CSV / JSON renderings.

#include "ncstein/inequality.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ncstein {

enum class ReportFormat { kCsv, kJson };

ReportFormat parse_report_format(const std::string& name);

struct ReportRow {
  std::string inequality_id;
  Exponent p;
  Exponent q;
  int lag = 0;
  int dim = 0;
  int seq_len = 0;
  std::string filtration;
  std::uint64_t seed = 0;
  double lhs = 0.0;
  std::string lhs_bound = "exact";
  double rhs = 0.0;
  std::string rhs_bound = "exact";
  std::optional<double> ratio;
  bool certifying = false;
  int evaluations = 0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

inline constexpr std::array<const char*, 15> kReportColumns{
    "inequality_id", "p",   "q",         "lag",   "dim",         "seq_len",
    "filtration",    "seed", "lhs",      "lhs_bound", "rhs",     "rhs_bound",
    "ratio",         "certifying", "evaluations"};

/// "exact", "lower", "upper", or "bracket:<upper>" for bracketed sides.
std::string bound_label(const NormValue& v);

ReportRow make_row(const RatioReport& r, const std::string& filtration, std::uint64_t seed,
                   int evaluations);

/// %.17g, with "inf" / "-inf" / "nan" spelled out.
std::string format_double(double v);
double parse_double(const std::string& text);

/// Stable sort by (inequality_id, p, q, seed).
void sort_rows(std::vector<ReportRow>& rows);

std::string render_csv(const std::vector<ReportRow>& rows);
std::string render_json(const std::vector<ReportRow>& rows);
std::string render(const std::vector<ReportRow>& rows, ReportFormat format);

/// Strict parsers: the header / field set must match kReportColumns exactly.
std::vector<ReportRow> parse_csv(const std::string& text);
std::vector<ReportRow> parse_json_report(const std::string& text);

/// Writes to `path`, or to stdout when `path` is empty.
void write_report(const std::vector<ReportRow>& rows, ReportFormat format,
                  const std::string& path);

}  // namespace ncstein
