#include "ncstein/report.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <tuple>

namespace ncstein {

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw Rejection("format must be csv or json (got '" + name + "')");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Rejection("not a number: '" + text + "'");
  }
  if (used != text.size()) throw Rejection("not a number: '" + text + "'");
  return v;
}

std::string bound_label(const NormValue& v) {
  if (v.bracket_upper) return "bracket:" + format_double(*v.bracket_upper);
  return to_string(v.bound);
}

ReportRow make_row(const RatioReport& r, const std::string& filtration, std::uint64_t seed,
                   int evaluations) {
  ReportRow row;
  row.inequality_id = to_string(r.id);
  row.p = r.p;
  row.q = r.q;
  row.lag = r.lag;
  row.dim = r.dim;
  row.seq_len = r.seq_len;
  row.filtration = filtration;
  row.seed = seed;
  row.lhs = r.lhs.value;
  row.lhs_bound = bound_label(r.lhs);
  row.rhs = r.rhs.value;
  row.rhs_bound = bound_label(r.rhs);
  row.ratio = r.ratio;
  row.certifying = r.certifying;
  row.evaluations = evaluations;
  return row;
}

void sort_rows(std::vector<ReportRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::make_tuple(a.inequality_id, a.p.value(), a.q.value(), a.seed) <
           std::make_tuple(b.inequality_id, b.p.value(), b.q.value(), b.seed);
  });
}

namespace {

std::vector<std::string> csv_fields(const ReportRow& r) {
  return {r.inequality_id,
          r.p.str(),
          r.q.str(),
          std::to_string(r.lag),
          std::to_string(r.dim),
          std::to_string(r.seq_len),
          r.filtration,
          std::to_string(r.seed),
          format_double(r.lhs),
          r.lhs_bound,
          format_double(r.rhs),
          r.rhs_bound,
          r.ratio ? format_double(*r.ratio) : "undefined",
          r.certifying ? "true" : "false",
          std::to_string(r.evaluations)};
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

int parse_int(const std::string& text) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    throw Rejection("not an integer: '" + text + "'");
  }
  if (used != text.size()) throw Rejection("not an integer: '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw Rejection("not a boolean: '" + text + "'");
}

nlohmann::ordered_json number_or_text(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double number_from(const nlohmann::ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_double(j.get<std::string>());
  throw Rejection("expected a number");
}

Exponent exponent_from(const nlohmann::ordered_json& j) {
  if (j.is_string()) return Exponent::parse(j.get<std::string>());
  return Exponent(j.get<double>());
}

}  // namespace

std::string render_csv(const std::vector<ReportRow>& rows) {
  std::string out;
  for (std::size_t i = 0; i < kReportColumns.size(); ++i) {
    out += (i ? "," : "");
    out += kReportColumns[i];
  }
  out += '\n';
  for (const ReportRow& r : rows) {
    const auto fields = csv_fields(r);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      out += (i ? "," : "");
      out += fields[i];
    }
    out += '\n';
  }
  return out;
}

std::string render_json(const std::vector<ReportRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ReportRow& r : rows) {
    nlohmann::ordered_json o;
    o["inequality_id"] = r.inequality_id;
    o["p"] = r.p.is_inf() ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(r.p.value());
    o["q"] = r.q.is_inf() ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(r.q.value());
    o["lag"] = r.lag;
    o["dim"] = r.dim;
    o["seq_len"] = r.seq_len;
    o["filtration"] = r.filtration;
    o["seed"] = r.seed;
    o["lhs"] = number_or_text(r.lhs);
    o["lhs_bound"] = r.lhs_bound;
    o["rhs"] = number_or_text(r.rhs);
    o["rhs_bound"] = r.rhs_bound;
    o["ratio"] = r.ratio ? number_or_text(*r.ratio) : nlohmann::ordered_json("undefined");
    o["certifying"] = r.certifying;
    o["evaluations"] = r.evaluations;
    arr.push_back(std::move(o));
  }
  return arr.dump(1) + "\n";
}

std::string render(const std::vector<ReportRow>& rows, ReportFormat format) {
  return format == ReportFormat::kCsv ? render_csv(rows) : render_json(rows);
}

std::vector<ReportRow> parse_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw Rejection("CSV report: missing header");
  const auto header = split(line, ',');
  if (header.size() != kReportColumns.size() ||
      !std::equal(header.begin(), header.end(), kReportColumns.begin())) {
    throw Rejection("CSV report: header does not match the schema");
  }
  std::vector<ReportRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    const auto f = split(line, ',');
    if (f.size() != kReportColumns.size()) {
      throw Rejection("CSV report: line " + std::to_string(lineno) + " has " +
                      std::to_string(f.size()) + " fields");
    }
    ReportRow r;
    r.inequality_id = f[0];
    r.p = Exponent::parse(f[1]);
    r.q = Exponent::parse(f[2]);
    r.lag = parse_int(f[3]);
    r.dim = parse_int(f[4]);
    r.seq_len = parse_int(f[5]);
    r.filtration = f[6];
    r.seed = std::stoull(f[7]);
    r.lhs = parse_double(f[8]);
    r.lhs_bound = f[9];
    r.rhs = parse_double(f[10]);
    r.rhs_bound = f[11];
    if (f[12] != "undefined") r.ratio = parse_double(f[12]);
    r.certifying = parse_bool(f[13]);
    r.evaluations = parse_int(f[14]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ReportRow> parse_json_report(const std::string& text) {
  const auto arr = nlohmann::ordered_json::parse(text);
  if (!arr.is_array()) throw Rejection("JSON report: expected an array");
  std::vector<ReportRow> rows;
  for (const auto& o : arr) {
    if (!o.is_object() || o.size() != kReportColumns.size()) {
      throw Rejection("JSON report: object does not match the schema");
    }
    for (const char* key : kReportColumns) {
      if (!o.contains(key)) throw Rejection(std::string("JSON report: missing field ") + key);
    }
    ReportRow r;
    r.inequality_id = o["inequality_id"].get<std::string>();
    r.p = exponent_from(o["p"]);
    r.q = exponent_from(o["q"]);
    r.lag = o["lag"].get<int>();
    r.dim = o["dim"].get<int>();
    r.seq_len = o["seq_len"].get<int>();
    r.filtration = o["filtration"].get<std::string>();
    r.seed = o["seed"].get<std::uint64_t>();
    r.lhs = number_from(o["lhs"]);
    r.lhs_bound = o["lhs_bound"].get<std::string>();
    r.rhs = number_from(o["rhs"]);
    r.rhs_bound = o["rhs_bound"].get<std::string>();
    if (!(o["ratio"].is_string() && o["ratio"].get<std::string>() == "undefined")) {
      r.ratio = number_from(o["ratio"]);
    }
    r.certifying = o["certifying"].get<bool>();
    r.evaluations = o["evaluations"].get<int>();
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_report(const std::vector<ReportRow>& rows, ReportFormat format,
                  const std::string& path) {
  const std::string text = render(rows, format);
  if (path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace ncstein
