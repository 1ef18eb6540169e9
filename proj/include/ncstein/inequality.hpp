#pragma once

// Stein-type inequalities and their ingredients, each evaluated on concrete
// inputs as a ratio report.

#include "ncstein/expectation.hpp"
#include "ncstein/seqnorm.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ncstein {

enum class InequalityId {
  kSteinPQ,         // s_pq: ||(sum E(x_n)^q)^{1/q}||_p vs ||(sum x_n^q)^{1/q}||_p
  kSteinQQ,         // s_qq: the p = q case, constant 1
  kQiuS12,          // qiu_s12: adapted, p = 1, q = 2, lag 1, constant 2
  kSteinIsometry,   // s_iso: conjugated by isometries
  kDualDoob,        // dd: ||sum E_n(x_n)||_p vs ||sum x_n||_p
  kDoobMaximal,     // doob_max: ||sup+ E_n(x)||_p vs ||x||_p
  kSteinPInf,       // s_pinf: l_inf norms of (E_n(x_n)) vs (x_n)
  kCrpStein,        // crp: CR_p norms, adapted, lag 1
  kProjections,     // proj: mutually orthogonal projections, rhs 1
  kSemicommutative  // semicomm: L_inf(Omega) (x) M embedding
};

std::string to_string(InequalityId id);
InequalityId parse_inequality_id(const std::string& name);
/// Lag used by the inequality's printed form (E_{n-1} -> 1, E_n -> 0).
int default_lag(InequalityId id);

struct RatioReport {
  InequalityId id = InequalityId::kSteinPQ;
  NormValue lhs;
  NormValue rhs;
  /// lhs / rhs; for bracketed sides lower(lhs) / upper(rhs). Empty when rhs = 0.
  std::optional<double> ratio;
  /// [lower(lhs)/upper(rhs), upper(lhs)/lower(rhs)] for bracketed reports.
  std::optional<std::pair<double, double>> ratio_interval;
  Exponent p;
  Exponent q;
  int lag = 0;
  bool certifying = false;
  int seq_len = 0;
  int dim = 0;
};

/// Width below which a bracket counts as determined.
inline constexpr double kBracketTolerance = 1e-6;

/// Fills ratio, interval and certifying from lhs/rhs.
void finalize_report(RatioReport& report);

struct CheckOptions {
  LinfOptions linf;
  CrpOptions crp;
};

/// Rejects (p, q, lag) outside the range proved for `id`, naming the violated
/// constraint. Exponents irrelevant to `id` are ignored.
void validate_parameters(InequalityId id, Exponent p, Exponent q, int lag);

RatioReport check_stein_pq(const OperatorSequence& seq, const Filtration& filt, Exponent p,
                           double q, int lag);

/// Adapted S_{1,2}: check_stein_pq at p = 1, q = 2 after confirming adaptedness.
RatioReport check_qiu_s12(const OperatorSequence& seq, const Filtration& filt, int lag = 1);

RatioReport check_stein_isometry(const OperatorSequence& seq,
                                 const OperatorSequence& isometries, const Filtration& filt,
                                 Exponent p, double q, int lag = 0);

RatioReport check_dual_doob(const OperatorSequence& seq, const Filtration& filt, Exponent p);

RatioReport check_doob_maximal(const Operator& x, const Filtration& filt, Exponent p,
                               const CheckOptions& opts = {});

RatioReport check_sp_inf(const OperatorSequence& seq, const Filtration& filt, Exponent p,
                         int lag = 0, const CheckOptions& opts = {});

RatioReport check_crp_stein(const OperatorSequence& seq, const Filtration& filt, Exponent p,
                            int lag = 1, const CheckOptions& opts = {});

RatioReport check_projections(const Filtration& filt, Exponent p, double q,
                              const OperatorSequence& projections);

struct JensenGap {
  Operator gap;  // E(x^q) - E(x)^q
  double min_eigenvalue = 0.0;
};

JensenGap jensen_gap(const Operator& x, const SubalgebraSpec& spec, double q);

/// min eigenvalue of B^r - A^r.
double monotonicity_gap(const Operator& a, const Operator& b, double r);

struct ViolationSearch {
  bool found = false;
  int trials_used = 0;
  double worst = 0.0;  // most negative min eigenvalue seen
};

/// Seeded search for x >= 0 with min eig(E(x^q) - E(x)^q) < threshold.
ViolationSearch search_jensen_violation(const SubalgebraSpec& spec, double q, int max_trials,
                                        std::uint64_t seed, double threshold = -1e-6);

/// Seeded search for 0 <= A <= B with min eig(B^r - A^r) < threshold.
ViolationSearch search_monotonicity_violation(int dim, double r, int max_trials,
                                              std::uint64_t seed, double threshold = -1e-6);

/// A process on a finite sample space: paths[w] is (f_n(w))_n at atom w.
struct ClassicalProcess {
  std::vector<double> probabilities;
  std::vector<OperatorSequence> paths;
  /// levels[n][w] is the cell of atom w at time n; later levels refine earlier.
  std::vector<std::vector<int>> levels;
};

/// The process embedded block-diagonally into one tracial space, atoms
/// replicated by rational probability weights, with the induced filtration.
struct SemicommutativeEmbedding {
  OperatorSequence sequence;
  Filtration filtration;
  std::vector<int> replication;
};

SemicommutativeEmbedding embed_process(const ClassicalProcess& process);

RatioReport check_semicommutative(const ClassicalProcess& process, Exponent p, double q,
                                  int lag = 0);

}  // namespace ncstein
