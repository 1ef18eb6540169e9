#pragma once

// Config-driven orchestration behind the ncstein command line.

#include "ncstein/report.hpp"
#include "ncstein/search.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ncstein {

enum class Command { kAxioms, kCheck, kSearch, kTable };

std::string to_string(Command c);
Command parse_command(const std::string& name);

/// Raised for malformed or out-of-range configuration; the message names the key.
class ConfigError : public Rejection {
 public:
  using Rejection::Rejection;
};

struct RunConfig {
  Command command = Command::kCheck;
  InequalityId inequality = InequalityId::kSteinQQ;
  Exponent p{2.0};
  Exponent q{2.0};
  int lag = 0;
  int dim = 4;
  std::vector<int> local_dims;
  FiltrationKind filtration = FiltrationKind::kDyadicPinching;
  std::uint64_t seed = 0;
  int seq_len = 3;
  int samples = 1;
  int budget = 1000;
  int restarts = 8;
  double step_scale = 0.5;
  bool adapted_only = false;
  std::string output;  // empty: stdout
  ReportFormat format = ReportFormat::kCsv;
  std::vector<std::pair<Exponent, Exponent>> grid;
  std::string witness;  // search: optional path for the witness sequence
};

inline constexpr const char* kSeedEnvironment = "NCSTEIN_SEED";

/// Strict parse plus validation. `command` supplies or must agree with the
/// document's "command" key.
RunConfig parse_config(const std::string& text, std::optional<Command> command = std::nullopt);

/// Downstream precondition checks, run before any computation.
void validate_config(const RunConfig& cfg);

/// seed precedence: flag, then NCSTEIN_SEED, then the config value.
std::uint64_t resolve_seed(std::uint64_t config_seed, std::optional<std::uint64_t> flag,
                           const char* env_value);

std::uint64_t parse_seed(const std::string& text);

struct RunOutcome {
  std::vector<ReportRow> rows;          // sorted
  std::vector<std::string> violations;  // failed hard assertions
  std::vector<std::string> errors;      // per-point runtime failures
  std::optional<SearchResult> search;   // search command only
};

RunOutcome execute(const RunConfig& cfg);

/// Proved-constant ceilings: s_qq ratio <= 1 + 1e-8, qiu_s12 ratio <= 2 + 1e-6,
/// dd at p = 1 |lhs - rhs| <= 1e-10, axiom residuals <= 1e-9.
std::vector<std::string> hard_assertion_failures(const std::vector<ReportRow>& rows);

/// execute + write_report (+ witness file). Exit 0 ok, 2 hard-assertion
/// failure (report still written), 1 configuration or runtime error.
int run_command(const RunConfig& cfg, std::ostream& diag);

std::string filtration_label(const RunConfig& cfg);

}  // namespace ncstein
