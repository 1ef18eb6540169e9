#pragma once

// Norms of finite operator sequences: column/row l_2, column l_q, CR_p,
// L_p(M; l_1) and L_p(M; l_inf) on positive sequences.

#include "ncstein/opcore.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace ncstein {

enum class BoundDirection { kExact, kLower, kUpper };

std::string to_string(BoundDirection b);

/// Dual feasible point for the positive l_inf norm: y_n >= 0 with
/// ||sum y_n||_{p'} <= 1; the objective sum tau(x_n y_n) is a lower bound.
struct DualCertificate {
  OperatorSequence duals;
  double objective = 0.0;
  double feasibility = 0.0;
};

/// x_n = a y_n b with ||y_n||_inf <= 1; ||a||_{2p} ||b||_{2p} is an upper bound.
struct FactorizationWitness {
  Operator a;
  Operator b;
  OperatorSequence contractions;
};

/// x_n = column_part_n + row_part_n for the p < 2 branch of CR_p.
struct SplittingWitness {
  OperatorSequence column_part;
  OperatorSequence row_part;
};

using Certificate =
    std::variant<std::monostate, DualCertificate, FactorizationWitness, SplittingWitness>;

struct NormValue {
  double value = 0.0;
  BoundDirection bound = BoundDirection::kExact;
  /// Upper end of a bracket when `bound` is kLower and an upper companion exists.
  std::optional<double> bracket_upper;
  Certificate certificate;

  static NormValue exact(double v) { return {v, BoundDirection::kExact, std::nullopt, {}}; }
  double upper_or_value() const { return bracket_upper.value_or(value); }
};

/// How |x_n|^q is formed. Positive items use x_n^q directly.
enum class ItemKind { kGeneral, kPositive };

/// |x|^q; q == 2 uses x*x for either kind.
Operator abs_power(const Operator& x, double q, ItemKind kind);

/// ||(sum |x_n|^q)^{1/q}||_p. Uses ||sum |x_n|^q||_{p/q}^{1/q} when p >= q and
/// the explicit q-th root otherwise.
NormValue column_q_norm(const OperatorSequence& seq, Exponent p, double q,
                        ItemKind kind = ItemKind::kGeneral);

/// Both evaluation routes, for cross-checking.
double column_q_norm_root_route(const OperatorSequence& seq, Exponent p, double q,
                                ItemKind kind = ItemKind::kGeneral);
double column_q_norm_trace_route(const OperatorSequence& seq, Exponent p, double q,
                                 ItemKind kind = ItemKind::kGeneral);

NormValue row_2_norm(const OperatorSequence& seq, Exponent p);

struct CrpOptions {
  int max_steps = 2000;
  double rel_tol = 1e-12;
};

/// max(column, row) for p >= 2 (exact); best splitting found for p < 2 (upper).
NormValue crp_norm(const OperatorSequence& seq, Exponent p, const CrpOptions& opts = {});

/// The infimal-splitting branch inf_{x = a + b} column(a) + row(b), for any
/// finite p; an upper bound carrying a SplittingWitness.
NormValue crp_split_norm(const OperatorSequence& seq, Exponent p, const CrpOptions& opts = {});

/// ||sum x_n||_p for PSD items.
NormValue l1_norm_positive(const OperatorSequence& seq, Exponent p);

/// ||s^{1/q}||_p for PSD s, by the same route column_q_norm uses.
double q_root_norm(const Operator& s, Exponent p, double q);

struct LinfOptions {
  int restarts = 8;
  int max_iters = 20000;
  /// Stop once 20 accepted steps improve the objective by less than this
  /// relative amount.
  double rel_tol = 1e-12;
  std::uint64_t seed = 0;
  bool parallel = true;
};

struct LinfBracket {
  NormValue lower;  // dual ascent, carries DualCertificate
  NormValue upper;  // factorization, carries FactorizationWitness

  /// lower with the upper value attached as bracket_upper.
  NormValue as_side() const;
};

/// ||sup+_n x_n||_p for PSD items, bracketed by dual ascent and factorization.
LinfBracket linf_norm_positive(const OperatorSequence& seq, Exponent p,
                               const LinfOptions& opts = {});

/// Factorization bound for a majorant candidate w >= 0:
/// a = b = (c w)^{1/2}, y_n = (c w)^{-1/2} x_n (c w)^{-1/2}, c = max ||w^{-1/2} x_n w^{-1/2}||.
/// Returns nullopt when w's support misses part of some x_n.
std::optional<std::pair<double, FactorizationWitness>> factorization_bound(
    const OperatorSequence& seq, const Operator& w, Exponent p);

/// sum tau(x_n y_n) and ||sum y_n||_{p'} for the given duals.
DualCertificate evaluate_dual(const OperatorSequence& seq, const OperatorSequence& duals,
                              Exponent p);

void require_nonempty(const OperatorSequence& seq, const char* who);
void require_common_dim(const OperatorSequence& seq, const char* who);
void require_positive(const OperatorSequence& seq, const char* who);
bool is_zero_sequence(const OperatorSequence& seq);
OperatorSequence adjoint_sequence(const OperatorSequence& seq);
Operator sequence_sum(const OperatorSequence& seq);

}  // namespace ncstein
