#pragma once

// Hill-climbing search for extremal lhs/rhs ratios of an inequality over
// positive sequences x_n = z_n* z_n.

#include "ncstein/inequality.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ncstein {

struct SearchConfig {
  InequalityId inequality = InequalityId::kSteinQQ;
  Exponent p{2.0};
  Exponent q{2.0};
  int dim = 4;
  int seq_len = 4;
  FiltrationKind filtration = FiltrationKind::kDyadicPinching;
  std::vector<int> local_dims;  // tensor filtration only
  int lag = 0;
  int budget = 1000;    // ratio evaluations across all restarts
  int restarts = 8;
  double step_scale = 0.5;
  std::uint64_t seed = 0;
  bool adapted_only = false;
  CheckOptions check;
};

struct TrajectoryPoint {
  int evaluation = 0;
  double best = 0.0;
};

struct SearchResult {
  double best_ratio = 0.0;
  /// Rescaled so that the checker's rhs equals 1.
  OperatorSequence witness;
  RatioReport report;  // the checker's report on `witness`
  int evaluations_used = 0;
  std::vector<TrajectoryPoint> trajectory;
};

/// Rejects configurations the search cannot run (budget, sizes, inequality,
/// parameter range, sequence length vs filtration depth).
void validate_search_config(const SearchConfig& cfg);

Filtration search_filtration(const SearchConfig& cfg);

/// Adapted searches are forced for inequalities that require adaptedness.
bool search_requires_adapted(InequalityId id);

/// The checker for `id` applied to a positive sequence (doob_max reads item 0).
RatioReport evaluate_inequality(InequalityId id, const OperatorSequence& seq,
                                const Filtration& filt, Exponent p, Exponent q, int lag,
                                const CheckOptions& opts);

/// Restarts run concurrently; the result does not depend on the schedule.
SearchResult estimate_constant(const SearchConfig& cfg);
/// Same computation, one restart after another.
SearchResult estimate_constant_serial(const SearchConfig& cfg);

struct SweepPoint {
  Exponent p;
  Exponent q;
  std::optional<SearchResult> result;
  std::string error;  // set when the point failed
};

/// One search per (p, q); failures are recorded, not propagated.
std::vector<SweepPoint> sweep(const std::vector<std::pair<Exponent, Exponent>>& grid,
                              const SearchConfig& base);

}  // namespace ncstein
