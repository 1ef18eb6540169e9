#include "ncstein/runner.hpp"

#include "ncstein/matrix_io.hpp"
#include "ncstein/sampling.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <set>

namespace ncstein {

std::string to_string(Command c) {
  switch (c) {
    case Command::kAxioms: return "axioms";
    case Command::kCheck: return "check";
    case Command::kSearch: return "search";
    case Command::kTable: return "table";
  }
  return "?";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::kAxioms, Command::kCheck, Command::kSearch, Command::kTable}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError("command must be one of axioms, check, search, table (got '" + name + "')");
}

namespace {

using nlohmann::json;

constexpr double kAxiomTolerance = 1e-9;
constexpr double kSteinQQCeiling = 1.0 + 1e-8;
constexpr double kQiuCeiling = 2.0 + 1e-6;
constexpr double kDualDoobEquality = 1e-10;

// Atoms of the semicommutative check: two binary splits of four atoms.
const std::vector<std::vector<int>> kSemicommutativeLevels{
    {0, 0, 0, 0}, {0, 0, 1, 1}, {0, 1, 2, 3}};

const std::set<std::string> kKeys{
    "command", "inequality", "p",       "q",        "lag",          "dim",    "local_dims",
    "filtration", "seed",    "seq_len", "samples",  "budget",       "restarts", "step_scale",
    "adapted_only", "output", "format", "grid",     "witness"};

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError("key '" + key + "': " + what);
}

Exponent exponent_value(const json& v, const std::string& key) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return Exponent::infinity();
    fail(key, "expected a number or \"inf\" (got \"" + s + "\")");
  }
  if (!v.is_number()) fail(key, "expected a number or \"inf\"");
  const double x = v.get<double>();
  if (!(x >= 1.0)) {
    fail(key, key + " ≥ 1 required (got " + format_double(x) + ")");
  }
  return std::isinf(x) ? Exponent::infinity() : Exponent(x);
}

int int_value(const json& v, const std::string& key, int lo) {
  if (!v.is_number_integer()) fail(key, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > 1'000'000'000) fail(key, "must be an integer ≥ " + std::to_string(lo));
  return static_cast<int>(x);
}

std::string string_value(const json& v, const std::string& key) {
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

template <typename F>
auto keyed(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(key, e.what());
  }
}

Filtration config_filtration(const RunConfig& cfg) {
  return keyed("filtration", [&] { return make_filtration(cfg.filtration, cfg.dim, cfg.local_dims); });
}

SearchConfig search_config(const RunConfig& cfg, Exponent p, Exponent q) {
  SearchConfig s;
  s.inequality = cfg.inequality;
  s.p = p;
  s.q = q;
  s.dim = cfg.dim;
  s.seq_len = cfg.seq_len;
  s.filtration = cfg.filtration;
  s.local_dims = cfg.local_dims;
  s.lag = cfg.lag;
  s.budget = cfg.budget;
  s.restarts = cfg.restarts;
  s.step_scale = cfg.step_scale;
  s.seed = cfg.seed;
  s.adapted_only = cfg.adapted_only;
  s.check.linf.seed = cfg.seed;
  return s;
}

int items_needed(const RunConfig& cfg) {
  const bool adapted =
      cfg.inequality == InequalityId::kQiuS12 || cfg.inequality == InequalityId::kCrpStein;
  return cfg.seq_len + (adapted ? cfg.lag : 0);
}

}  // namespace

std::string filtration_label(const RunConfig& cfg) {
  if (cfg.command != Command::kAxioms && cfg.inequality == InequalityId::kSemicommutative) {
    return "classical";
  }
  std::string label = to_string(cfg.filtration);
  if (cfg.filtration == FiltrationKind::kTensor) {
    label += ":";
    for (std::size_t i = 0; i < cfg.local_dims.size(); ++i) {
      label += (i ? "x" : "") + std::to_string(cfg.local_dims[i]);
    }
  }
  return label;
}

RunConfig parse_config(const std::string& text, std::optional<Command> command) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("malformed config: expected a JSON object");
  for (const auto& item : doc.items()) {
    if (!kKeys.count(item.key())) throw ConfigError("unknown key '" + item.key() + "'");
  }

  RunConfig cfg;
  if (doc.contains("command")) {
    cfg.command = keyed("command", [&] { return parse_command(string_value(doc["command"], "command")); });
    if (command && *command != cfg.command) {
      fail("command", "config says '" + to_string(cfg.command) + "' but '" +
                          to_string(*command) + "' was requested");
    }
  } else if (command) {
    cfg.command = *command;
  } else {
    throw ConfigError("missing required key 'command'");
  }

  const bool needs_inequality = cfg.command != Command::kAxioms;
  if (doc.contains("inequality")) {
    cfg.inequality = keyed("inequality", [&] {
      return parse_inequality_id(string_value(doc["inequality"], "inequality"));
    });
  } else if (needs_inequality) {
    throw ConfigError("missing required key 'inequality'");
  }

  if (doc.contains("filtration")) {
    cfg.filtration = keyed("filtration", [&] {
      return parse_filtration_kind(string_value(doc["filtration"], "filtration"));
    });
  }
  if (doc.contains("local_dims")) {
    const json& ld = doc["local_dims"];
    if (!ld.is_array() || ld.empty()) fail("local_dims", "expected a nonempty array of integers");
    for (const json& v : ld) cfg.local_dims.push_back(int_value(v, "local_dims", 1));
  }
  if (doc.contains("dim")) {
    cfg.dim = int_value(doc["dim"], "dim", 1);
  } else if (cfg.filtration == FiltrationKind::kTensor && !cfg.local_dims.empty()) {
    cfg.dim = std::accumulate(cfg.local_dims.begin(), cfg.local_dims.end(), 1,
                              std::multiplies<>());
  } else if (cfg.inequality != InequalityId::kSemicommutative || cfg.command == Command::kAxioms) {
    throw ConfigError("missing required key 'dim'");
  } else {
    cfg.dim = 1;
  }

  // Exponents: those fixed by the inequality get defaults.
  const bool has_p = doc.contains("p");
  const bool has_q = doc.contains("q");
  if (has_p) cfg.p = exponent_value(doc["p"], "p");
  if (has_q) cfg.q = exponent_value(doc["q"], "q");
  if (cfg.command == Command::kCheck || cfg.command == Command::kSearch) {
    switch (cfg.inequality) {
      case InequalityId::kQiuS12:
        if (!has_p) cfg.p = Exponent(1.0);
        if (!has_q) cfg.q = Exponent(2.0);
        break;
      case InequalityId::kDualDoob:
        if (!has_q) cfg.q = Exponent(1.0);
        break;
      case InequalityId::kDoobMaximal:
      case InequalityId::kSteinPInf:
        if (!has_q) cfg.q = Exponent::infinity();
        break;
      case InequalityId::kCrpStein:
        if (!has_q) cfg.q = Exponent(2.0);
        break;
      case InequalityId::kSteinQQ:
        if (!has_q && has_p) cfg.q = cfg.p;
        if (!has_p && has_q) cfg.p = cfg.q;
        if (!has_p && !has_q) throw ConfigError("missing required key 'p'");
        break;
      default:
        if (!has_q) throw ConfigError("missing required key 'q'");
        break;
    }
    if (!has_p && cfg.inequality != InequalityId::kQiuS12 &&
        cfg.inequality != InequalityId::kSteinQQ) {
      throw ConfigError("missing required key 'p'");
    }
  }

  cfg.lag = doc.contains("lag") ? int_value(doc["lag"], "lag", 0) : default_lag(cfg.inequality);
  if (cfg.lag > 1) fail("lag", "must be 0 or 1");
  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_unsigned()) fail("seed", "expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("seq_len")) cfg.seq_len = int_value(doc["seq_len"], "seq_len", 1);
  cfg.samples = cfg.command == Command::kAxioms ? 100 : 1;
  if (doc.contains("samples")) cfg.samples = int_value(doc["samples"], "samples", 1);
  if (doc.contains("budget")) cfg.budget = int_value(doc["budget"], "budget", 0);
  if (doc.contains("restarts")) cfg.restarts = int_value(doc["restarts"], "restarts", 0);
  if (doc.contains("step_scale")) {
    const json& v = doc["step_scale"];
    if (!v.is_number() || !(v.get<double>() > 0.0)) fail("step_scale", "must be a positive number");
    cfg.step_scale = v.get<double>();
  }
  if (doc.contains("adapted_only")) {
    if (!doc["adapted_only"].is_boolean()) fail("adapted_only", "expected true or false");
    cfg.adapted_only = doc["adapted_only"].get<bool>();
  }
  if (doc.contains("output")) cfg.output = string_value(doc["output"], "output");
  if (doc.contains("format")) {
    cfg.format = keyed("format", [&] { return parse_report_format(string_value(doc["format"], "format")); });
  }
  if (doc.contains("witness")) cfg.witness = string_value(doc["witness"], "witness");
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (!g.is_array()) fail("grid", "expected an array of [p, q] pairs");
    for (const json& pt : g) {
      if (!pt.is_array() || pt.size() != 2) fail("grid", "each entry must be a [p, q] pair");
      cfg.grid.emplace_back(exponent_value(pt[0], "grid.p"), exponent_value(pt[1], "grid.q"));
    }
  } else if (cfg.command == Command::kTable) {
    throw ConfigError("missing required key 'grid'");
  }

  validate_config(cfg);
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  const bool semicomm = cfg.inequality == InequalityId::kSemicommutative;
  if (cfg.command == Command::kAxioms || !semicomm) {
    const Filtration filt = config_filtration(cfg);
    if (cfg.command == Command::kCheck && cfg.inequality != InequalityId::kDoobMaximal &&
        cfg.inequality != InequalityId::kProjections && items_needed(cfg) > filt.size()) {
      fail("seq_len", "needs " + std::to_string(items_needed(cfg)) +
                          " filtration levels, the filtration has " + std::to_string(filt.size()));
    }
  }
  if (cfg.command == Command::kAxioms) return;
  if (cfg.command == Command::kCheck) {
    keyed("p", [&] {
      validate_parameters(cfg.inequality, cfg.p, cfg.q, cfg.lag);
      return 0;
    });
    if (cfg.inequality == InequalityId::kProjections && cfg.seq_len > cfg.dim) {
      fail("seq_len", "proj needs seq_len ≤ dim");
    }
    if (semicomm && cfg.seq_len > static_cast<int>(kSemicommutativeLevels.size())) {
      fail("seq_len", "semicomm needs seq_len ≤ " +
                          std::to_string(kSemicommutativeLevels.size()));
    }
    return;
  }
  if (cfg.command == Command::kSearch) {
    keyed("budget", [&] {
      validate_search_config(search_config(cfg, cfg.p, cfg.q));
      return 0;
    });
    return;
  }
  if (!(cfg.restarts >= 1 && cfg.budget >= cfg.restarts)) fail("budget", "budget ≥ restarts ≥ 1");
  for (const auto& [p, q] : cfg.grid) {
    keyed("grid", [&] {
      validate_search_config(search_config(cfg, p, q));
      return 0;
    });
  }
}

std::uint64_t parse_seed(const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("seed must be a non-negative integer (got '" + text + "')");
  }
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw ConfigError("seed out of range: '" + text + "'");
  }
}

std::uint64_t resolve_seed(std::uint64_t config_seed, std::optional<std::uint64_t> flag,
                           const char* env_value) {
  if (flag) return *flag;
  if (env_value && *env_value) return parse_seed(env_value);
  return config_seed;
}

namespace {

ReportRow axiom_row(const std::string& name, Exponent p, double residual, const RunConfig& cfg) {
  ReportRow row;
  row.inequality_id = "axiom:" + name;
  row.p = p;
  row.q = Exponent::infinity();
  row.dim = cfg.dim;
  row.filtration = filtration_label(cfg);
  row.seed = cfg.seed;
  row.lhs = residual;
  row.rhs = kAxiomTolerance;
  row.ratio = residual / kAxiomTolerance;
  row.certifying = residual <= kAxiomTolerance;
  row.evaluations = cfg.samples;
  return row;
}

void run_axioms(const RunConfig& cfg, RunOutcome& out) {
  const Filtration filt = config_filtration(cfg);
  for (int n = 0; n < filt.size(); ++n) {
    const AxiomResiduals r = axiom_residuals(filt.level(n), cfg.samples, cfg.seed + n);
    const std::string lv = ":E" + std::to_string(n);
    const Exponent inf = Exponent::infinity();
    out.rows.push_back(axiom_row("projection" + lv, inf, r.projection, cfg));
    out.rows.push_back(axiom_row("bimodule" + lv, inf, r.bimodule, cfg));
    out.rows.push_back(axiom_row("trace" + lv, inf, r.trace, cfg));
    out.rows.push_back(axiom_row("positivity" + lv, inf, r.positivity, cfg));
    out.rows.push_back(axiom_row("adjoint" + lv, inf, r.adjoint, cfg));
    for (std::size_t i = 0; i < kContractivityExponents.size(); ++i) {
      out.rows.push_back(axiom_row("contractivity" + lv, kContractivityExponents[i],
                                   r.contractivity_by_p[i], cfg));
    }
  }
  out.rows.push_back(axiom_row("tower", Exponent::infinity(),
                               tower_residual(filt, cfg.samples, cfg.seed), cfg));
}

RatioReport check_sample(const RunConfig& cfg, std::uint64_t seed) {
  auto rng = make_rng(seed, 0xc4ecu + static_cast<std::uint64_t>(cfg.inequality));
  CheckOptions opts;
  opts.linf.seed = seed;
  const double q = cfg.q.value();

  if (cfg.inequality == InequalityId::kSemicommutative) {
    ClassicalProcess proc;
    std::vector<double> w(kSemicommutativeLevels.front().size());
    std::uniform_int_distribution<int> weight(1, 4);
    for (double& x : w) x = weight(rng);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double x : w) proc.probabilities.push_back(x / total);
    for (std::size_t a = 0; a < w.size(); ++a) {
      proc.paths.push_back(random_positive_sequence(cfg.dim, cfg.seq_len, rng));
    }
    proc.levels = kSemicommutativeLevels;
    return check_semicommutative(proc, cfg.p, q, cfg.lag);
  }

  const Filtration filt = config_filtration(cfg);
  switch (cfg.inequality) {
    case InequalityId::kQiuS12:
      return check_qiu_s12(random_adapted_positive(filt, cfg.seq_len, cfg.lag, rng), filt, cfg.lag);
    case InequalityId::kCrpStein:
      return check_crp_stein(random_adapted_positive(filt, cfg.seq_len, cfg.lag, rng), filt,
                             cfg.p, cfg.lag, opts);
    case InequalityId::kSteinIsometry: {
      const OperatorSequence seq = random_positive_sequence(cfg.dim, cfg.seq_len, rng);
      OperatorSequence ys;
      for (int n = 0; n < cfg.seq_len; ++n) ys.push_back(random_unitary(cfg.dim, rng));
      return check_stein_isometry(seq, ys, filt, cfg.p, q, cfg.lag);
    }
    case InequalityId::kDoobMaximal:
      return check_doob_maximal(random_psd(cfg.dim, rng), filt, cfg.p, opts);
    case InequalityId::kProjections: {
      const int rank = std::max(1, cfg.dim / cfg.seq_len);
      const OperatorSequence projs = random_projection_family(cfg.dim, cfg.seq_len, rank, rng);
      return check_projections(filt, cfg.p, q, projs);
    }
    default:
      return evaluate_inequality(cfg.inequality,
                                 random_positive_sequence(cfg.dim, cfg.seq_len, rng), filt,
                                 cfg.p, cfg.q, cfg.lag, opts);
  }
}

void assert_ceilings(const ReportRow& row, std::vector<std::string>& out) {
  if (row.inequality_id.rfind("axiom:", 0) == 0) {
    if (!(row.lhs <= kAxiomTolerance)) {
      out.push_back(row.inequality_id + " residual " + format_double(row.lhs) + " exceeds " +
                    format_double(kAxiomTolerance));
    }
    return;
  }
  const std::string where = row.inequality_id + " (p=" + row.p.str() + ", q=" + row.q.str() +
                            ", seed=" + std::to_string(row.seed) + ")";
  const double ratio = row.ratio.value_or(0.0);
  if (row.inequality_id == "s_qq" && ratio > kSteinQQCeiling) {
    out.push_back(where + ": ratio " + format_double(ratio) + " exceeds 1 + 1e-8");
  }
  if (row.inequality_id == "qiu_s12" && ratio > kQiuCeiling) {
    out.push_back(where + ": ratio " + format_double(ratio) + " exceeds 2 + 1e-6");
  }
  if (row.inequality_id == "dd" && row.p == Exponent(1.0) &&
      std::abs(row.lhs - row.rhs) > kDualDoobEquality) {
    out.push_back(where + ": |lhs - rhs| = " + format_double(std::abs(row.lhs - row.rhs)) +
                             " exceeds 1e-10");
  }
}

ReportRow search_row(const RunConfig& cfg, const SearchResult& r) {
  ReportRow row = make_row(r.report, filtration_label(cfg), cfg.seed, r.evaluations_used);
  row.ratio = r.best_ratio;
  return row;
}

}  // namespace

RunOutcome execute(const RunConfig& cfg) {
  RunOutcome out;
  switch (cfg.command) {
    case Command::kAxioms:
      run_axioms(cfg, out);
      break;
    case Command::kCheck:
      for (int i = 0; i < cfg.samples; ++i) {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
        out.rows.push_back(make_row(check_sample(cfg, seed), filtration_label(cfg), seed, 1));
      }
      break;
    case Command::kSearch: {
      SearchResult r = estimate_constant(search_config(cfg, cfg.p, cfg.q));
      out.rows.push_back(search_row(cfg, r));
      out.search = std::move(r);
      break;
    }
    case Command::kTable:
      for (const SweepPoint& pt : sweep(cfg.grid, search_config(cfg, cfg.p, cfg.q))) {
        if (pt.result) {
          out.rows.push_back(search_row(cfg, *pt.result));
          continue;
        }
        ReportRow row;
        row.inequality_id = to_string(cfg.inequality);
        row.p = pt.p;
        row.q = pt.q;
        row.lag = cfg.lag;
        row.dim = cfg.dim;
        row.seq_len = cfg.seq_len;
        row.filtration = filtration_label(cfg);
        row.seed = cfg.seed;
        row.lhs = row.rhs = std::numeric_limits<double>::quiet_NaN();
        row.lhs_bound = row.rhs_bound = "error";
        out.rows.push_back(row);
        out.errors.push_back("grid point (" + pt.p.str() + ", " + pt.q.str() + "): " + pt.error);
      }
      break;
  }
  out.violations = hard_assertion_failures(out.rows);
  sort_rows(out.rows);
  return out;
}

std::vector<std::string> hard_assertion_failures(const std::vector<ReportRow>& rows) {
  std::vector<std::string> out;
  for (const ReportRow& row : rows) assert_ceilings(row, out);
  return out;
}

int run_command(const RunConfig& cfg, std::ostream& diag) {
  RunOutcome out;
  try {
    out = execute(cfg);
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << '\n';
    return 1;
  }
  try {
    write_report(out.rows, cfg.format, cfg.output);
    if (out.search && !cfg.witness.empty()) {
      json w;
      w["inequality"] = to_string(cfg.inequality);
      w["p"] = cfg.p.str();
      w["q"] = cfg.q.str();
      w["lag"] = cfg.lag;
      w["best_ratio"] = out.search->best_ratio;
      w["sequence"] = sequence_to_json(out.search->witness);
      write_json_file(cfg.witness, w);
    }
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << '\n';
    return 1;
  }
  for (const std::string& e : out.errors) diag << "error: " << e << '\n';
  for (const std::string& v : out.violations) diag << "hard assertion failed: " << v << '\n';
  if (!out.errors.empty()) return 1;
  return out.violations.empty() ? 0 : 2;
}

}  // namespace ncstein
