#include "ncstein/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ncstein {

std::string to_string(InequalityId id) {
  switch (id) {
    case InequalityId::kSteinPQ: return "s_pq";
    case InequalityId::kSteinQQ: return "s_qq";
    case InequalityId::kQiuS12: return "qiu_s12";
    case InequalityId::kSteinIsometry: return "s_iso";
    case InequalityId::kDualDoob: return "dd";
    case InequalityId::kDoobMaximal: return "doob_max";
    case InequalityId::kSteinPInf: return "s_pinf";
    case InequalityId::kCrpStein: return "crp";
    case InequalityId::kProjections: return "proj";
    case InequalityId::kSemicommutative: return "semicomm";
  }
  return "?";
}

InequalityId parse_inequality_id(const std::string& name) {
  for (InequalityId id :
       {InequalityId::kSteinPQ, InequalityId::kSteinQQ, InequalityId::kQiuS12,
        InequalityId::kSteinIsometry, InequalityId::kDualDoob, InequalityId::kDoobMaximal,
        InequalityId::kSteinPInf, InequalityId::kCrpStein, InequalityId::kProjections,
        InequalityId::kSemicommutative}) {
    if (to_string(id) == name) return id;
  }
  throw Rejection("unknown inequality '" + name + "'");
}

int default_lag(InequalityId id) {
  switch (id) {
    case InequalityId::kSteinQQ:
    case InequalityId::kQiuS12:
    case InequalityId::kCrpStein: return 1;
    default: return 0;
  }
}

namespace {

bool side_determined(const NormValue& v) {
  if (v.bound == BoundDirection::kExact) return true;
  if (v.bracket_upper) {
    return *v.bracket_upper - v.value <= kBracketTolerance * std::max(1.0, *v.bracket_upper);
  }
  return false;
}

void check_lag(int lag) {
  if (lag != 0 && lag != 1) throw Rejection("lag must be 0 or 1");
}

void check_length(const OperatorSequence& seq, const Filtration& filt, const char* who) {
  require_nonempty(seq, who);
  require_common_dim(seq, who);
  if (seq.front().rows() != filt.dim()) {
    throw Rejection(std::string(who) + ": sequence dim does not match filtration dim");
  }
  if (static_cast<int>(seq.size()) > filt.size()) {
    throw Rejection(std::string(who) + ": sequence of length " + std::to_string(seq.size()) +
                    " exceeds the " + std::to_string(filt.size()) + " filtration levels");
  }
}

OperatorSequence expect_each(const OperatorSequence& seq, const Filtration& filt) {
  OperatorSequence out;
  out.reserve(seq.size());
  for (std::size_t k = 0; k < seq.size(); ++k) {
    out.push_back(filt.expect(expectation_level(static_cast<int>(k)), seq[k]));
  }
  return out;
}

OperatorSequence hermitian_each(OperatorSequence seq) {
  for (Operator& x : seq) x = hermitian_part(x);
  return seq;
}

// y* x y, skipping the products when y is exactly the identity.
Operator conjugate(const Operator& y, const Operator& x) {
  if (y.isIdentity(0.0)) return x;
  return hermitian_part(y.adjoint() * x * y);
}

RatioReport base_report(InequalityId id, Exponent p, Exponent q, int lag,
                        const OperatorSequence& seq) {
  RatioReport r;
  r.id = id;
  r.p = p;
  r.q = q;
  r.lag = lag;
  r.seq_len = static_cast<int>(seq.size());
  r.dim = seq.empty() ? 0 : static_cast<int>(seq.front().rows());
  return r;
}

void validate_stein_range(Exponent p, double q) {
  if (!(q >= 1.0) || std::isinf(q)) throw Rejection("q must satisfy 1 <= q < inf");
  if (p.is_inf()) throw Rejection("p must be finite for Stein-type checks");
  const double pv = p.value();
  if (pv == q) return;
  if (q == 2.0) return;  // column l_2 range, including the adapted p = 1 case
  if (q > pv) throw Rejection("q > p lies outside the proved range (q must satisfy q <= p)");
  if (q > 2.0) throw Rejection("q > 2 with p != q lies outside the proved range");
}

}  // namespace

void validate_parameters(InequalityId id, Exponent p, Exponent q, int lag) {
  check_lag(lag);
  const double pv = p.value();
  const double qv = q.value();
  switch (id) {
    case InequalityId::kSteinPQ:
    case InequalityId::kSemicommutative:
      validate_stein_range(p, qv);
      return;
    case InequalityId::kSteinQQ:
      validate_stein_range(p, qv);
      if (pv != qv) throw Rejection("s_qq needs p = q");
      return;
    case InequalityId::kQiuS12:
      if (pv != 1.0 || qv != 2.0) throw Rejection("qiu_s12 needs p = 1 and q = 2");
      if (lag != 1) throw Rejection("qiu_s12 needs lag = 1");
      return;
    case InequalityId::kSteinIsometry:
      if (!(qv >= 1.0 && qv <= 2.0)) throw Rejection("s_iso needs 1 <= q <= 2");
      if (p.is_inf() || pv < qv) throw Rejection("s_iso needs q <= p < inf");
      return;
    case InequalityId::kDualDoob:
      return;
    case InequalityId::kDoobMaximal:
    case InequalityId::kSteinPInf:
      if (pv <= 1.0) throw Rejection(to_string(id) + " needs p > 1");
      return;
    case InequalityId::kCrpStein:
      if (p.is_inf() || pv <= 1.0) throw Rejection("crp needs 1 < p < inf");
      return;
    case InequalityId::kProjections:
      if (!(qv >= 1.0 && qv <= 2.0)) throw Rejection("proj needs 1 <= q <= 2");
      if (p.is_inf() || pv <= qv) throw Rejection("proj needs q < p < inf");
      return;
  }
}

void finalize_report(RatioReport& report) {
  const NormValue& lhs = report.lhs;
  const NormValue& rhs = report.rhs;
  const double rhs_hi = rhs.upper_or_value();
  const bool bracketed = lhs.bracket_upper.has_value() || rhs.bracket_upper.has_value();
  if (rhs_hi > 0.0) {
    report.ratio = lhs.value / rhs_hi;
    if (bracketed) {
      const double hi = rhs.value > 0.0 ? lhs.upper_or_value() / rhs.value
                                        : std::numeric_limits<double>::infinity();
      report.ratio_interval = std::make_pair(*report.ratio, hi);
    }
  } else {
    report.ratio.reset();
    report.ratio_interval.reset();
  }
  const bool lhs_ok = side_determined(lhs) || lhs.bound == BoundDirection::kUpper;
  const bool rhs_ok = side_determined(rhs) ||
                      (rhs.bound == BoundDirection::kLower && !rhs.bracket_upper);
  report.certifying = lhs_ok && rhs_ok;
}

RatioReport check_stein_pq(const OperatorSequence& seq, const Filtration& filt, Exponent p,
                           double q, int lag) {
  check_lag(lag);
  validate_stein_range(p, q);
  check_length(seq, filt, "check_stein_pq");
  const ItemKind kind = q == 2.0 ? ItemKind::kGeneral : ItemKind::kPositive;
  if (kind == ItemKind::kPositive) require_positive(seq, "check_stein_pq");

  const InequalityId id = p.value() == q ? InequalityId::kSteinQQ : InequalityId::kSteinPQ;
  RatioReport r = base_report(id, p, Exponent(q), lag, seq);
  OperatorSequence projected = expect_each(seq, filt);
  if (kind == ItemKind::kPositive) projected = hermitian_each(std::move(projected));
  r.lhs = column_q_norm(projected, p, q, kind);
  r.rhs = column_q_norm(seq, p, q, kind);
  finalize_report(r);
  return r;
}

RatioReport check_qiu_s12(const OperatorSequence& seq, const Filtration& filt, int lag) {
  check_lag(lag);
  check_length(seq, filt, "check_qiu_s12");
  const AdaptedCheck adapted = is_adapted(seq, filt, lag);
  if (!adapted.adapted) {
    throw Rejection("check_qiu_s12: sequence is not adapted (residual " +
                    std::to_string(adapted.residual) + ")");
  }
  RatioReport r = check_stein_pq(seq, filt, Exponent(1.0), 2.0, lag);
  r.id = InequalityId::kQiuS12;
  return r;
}

RatioReport check_stein_isometry(const OperatorSequence& seq,
                                 const OperatorSequence& isometries, const Filtration& filt,
                                 Exponent p, double q, int lag) {
  check_lag(lag);
  if (!(q >= 1.0 && q <= 2.0)) throw Rejection("check_stein_isometry: needs 1 <= q <= 2");
  if (p.is_inf() || p.value() < q) throw Rejection("check_stein_isometry: needs q <= p < inf");
  check_length(seq, filt, "check_stein_isometry");
  require_positive(seq, "check_stein_isometry");
  if (isometries.size() != seq.size()) {
    throw Rejection("check_stein_isometry: isometry count must match sequence length");
  }
  for (const Operator& y : isometries) {
    require_same_dim(y, seq.front());
    const double res = operator_norm(y.adjoint() * y - identity(static_cast<int>(y.rows())));
    if (res > 1e-10) throw Rejection("check_stein_isometry: y_n is not an isometry");
  }

  RatioReport r = base_report(InequalityId::kSteinIsometry, p, Exponent(q), lag, seq);
  OperatorSequence conjugated;
  for (std::size_t k = 0; k < seq.size(); ++k) conjugated.push_back(conjugate(isometries[k], seq[k]));
  r.lhs = column_q_norm(hermitian_each(expect_each(conjugated, filt)), p, q, ItemKind::kPositive);

  // rhs: ||(sum y_n* x_n^q y_n)^{1/q}||_p.
  const int d = static_cast<int>(seq.front().rows());
  Operator s = Operator::Zero(d, d);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    s += conjugate(isometries[k], abs_power(seq[k], q, ItemKind::kPositive));
  }
  s = hermitian_part(s);
  r.rhs = is_zero_sequence(seq) ? NormValue::exact(0.0) : NormValue::exact(q_root_norm(s, p, q));
  finalize_report(r);
  return r;
}

RatioReport check_dual_doob(const OperatorSequence& seq, const Filtration& filt, Exponent p) {
  check_length(seq, filt, "check_dual_doob");
  require_positive(seq, "check_dual_doob");
  RatioReport r = base_report(InequalityId::kDualDoob, p, Exponent(1.0), 0, seq);
  r.lhs = l1_norm_positive(hermitian_each(expect_each(seq, filt)), p);
  r.rhs = l1_norm_positive(seq, p);
  finalize_report(r);
  return r;
}

RatioReport check_doob_maximal(const Operator& x, const Filtration& filt, Exponent p,
                               const CheckOptions& opts) {
  if (!p.is_inf() && p.value() <= 1.0) {
    throw Rejection("check_doob_maximal: needs p > 1 (the conjugate exponent degenerates at p = 1)");
  }
  const OperatorSequence single{x};
  require_positive(single, "check_doob_maximal");
  require_same_dim(x, identity(filt.dim()));
  OperatorSequence martingale;
  for (int n = 0; n < filt.size(); ++n) martingale.push_back(hermitian_part(filt.expect(n, x)));

  RatioReport r = base_report(InequalityId::kDoobMaximal, p, Exponent::infinity(), 0, martingale);
  r.lhs = linf_norm_positive(martingale, p, opts.linf).as_side();
  r.rhs = NormValue::exact(schatten_norm_psd(x, p));
  finalize_report(r);
  return r;
}

RatioReport check_sp_inf(const OperatorSequence& seq, const Filtration& filt, Exponent p,
                         int lag, const CheckOptions& opts) {
  check_lag(lag);
  if (!p.is_inf() && p.value() <= 1.0) throw Rejection("check_sp_inf: needs p > 1");
  check_length(seq, filt, "check_sp_inf");
  require_positive(seq, "check_sp_inf");
  RatioReport r = base_report(InequalityId::kSteinPInf, p, Exponent::infinity(), lag, seq);
  r.lhs = linf_norm_positive(hermitian_each(expect_each(seq, filt)), p, opts.linf).as_side();
  r.rhs = linf_norm_positive(seq, p, opts.linf).as_side();
  finalize_report(r);
  return r;
}

RatioReport check_crp_stein(const OperatorSequence& seq, const Filtration& filt, Exponent p,
                            int lag, const CheckOptions& opts) {
  check_lag(lag);
  if (p.is_inf() || p.value() <= 1.0) throw Rejection("check_crp_stein: needs 1 < p < inf");
  check_length(seq, filt, "check_crp_stein");
  const AdaptedCheck adapted = is_adapted(seq, filt, lag);
  if (!adapted.adapted) {
    throw Rejection("check_crp_stein: sequence is not adapted (residual " +
                    std::to_string(adapted.residual) + ")");
  }
  RatioReport r = base_report(InequalityId::kCrpStein, p, Exponent(2.0), lag, seq);
  r.lhs = crp_norm(expect_each(seq, filt), p, opts.crp);
  r.rhs = crp_norm(seq, p, opts.crp);
  finalize_report(r);
  return r;
}

RatioReport check_projections(const Filtration& filt, Exponent p, double q,
                              const OperatorSequence& projections) {
  if (!(q >= 1.0 && q <= 2.0)) throw Rejection("check_projections: needs 1 <= q <= 2");
  if (p.is_inf() || p.value() <= q) throw Rejection("check_projections: needs q < p < inf");
  check_length(projections, filt, "check_projections");
  constexpr double tol = 1e-10;
  for (std::size_t i = 0; i < projections.size(); ++i) {
    const Operator& r = projections[i];
    if (operator_norm(r - r.adjoint()) > tol || operator_norm(r * r - r) > tol) {
      throw Rejection("check_projections: item " + std::to_string(i) + " is not a projection");
    }
    for (std::size_t j = i + 1; j < projections.size(); ++j) {
      if (operator_norm(r * projections[j]) > tol) {
        throw Rejection("check_projections: family is not mutually orthogonal");
      }
    }
  }
  RatioReport rep = base_report(InequalityId::kProjections, p, Exponent(q), 0, projections);
  rep.lhs = column_q_norm(hermitian_each(expect_each(projections, filt)), p, q, ItemKind::kPositive);
  // r^q = r for projections, so ||(sum r_n^q)^{1/q}||_p = ||sum r_n||_p^{...} <= ||1||_p = 1.
  rep.rhs = NormValue::exact(1.0);
  finalize_report(rep);
  return rep;
}

JensenGap jensen_gap(const Operator& x, const SubalgebraSpec& spec, double q) {
  if (!(q > 0.0)) throw Rejection("jensen_gap: q must be positive");
  if (!is_psd(x)) throw Rejection("jensen_gap: x must be PSD");
  JensenGap out;
  out.gap = hermitian_part(cond_exp(psd_power(x, q), spec) -
                           psd_power(hermitian_part(cond_exp(x, spec)), q));
  out.min_eigenvalue = min_eigenvalue(out.gap);
  return out;
}

double monotonicity_gap(const Operator& a, const Operator& b, double r) {
  return min_eigenvalue(psd_power(b, r) - psd_power(a, r));
}

ViolationSearch search_jensen_violation(const SubalgebraSpec& spec, double q, int max_trials,
                                        std::uint64_t seed, double threshold) {
  auto rng = make_rng(seed, 0x1e45u);
  ViolationSearch out;
  for (int t = 0; t < max_trials; ++t) {
    out.trials_used = t + 1;
    const double m = jensen_gap(random_psd(spec.dim(), rng), spec, q).min_eigenvalue;
    out.worst = std::min(out.worst, m);
    if (m < threshold) {
      out.found = true;
      break;
    }
  }
  return out;
}

ViolationSearch search_monotonicity_violation(int dim, double r, int max_trials,
                                              std::uint64_t seed, double threshold) {
  auto rng = make_rng(seed, 0x3070u);
  ViolationSearch out;
  for (int t = 0; t < max_trials; ++t) {
    out.trials_used = t + 1;
    const Operator a = random_psd(dim, rng);
    const Operator b = a + random_psd(dim, rng);
    const double m = monotonicity_gap(a, b, r);
    out.worst = std::min(out.worst, m);
    if (m < threshold) {
      out.found = true;
      break;
    }
  }
  return out;
}

namespace {

// Smallest common denominator K <= 4096 putting every probability on the grid.
std::vector<int> rational_weights(const std::vector<double>& probs) {
  for (int k = 1; k <= 4096; ++k) {
    std::vector<int> weights;
    bool ok = true;
    for (double pr : probs) {
      const double scaled = pr * k;
      const double rounded = std::round(scaled);
      if (std::abs(scaled - rounded) > 1e-9 * k || rounded < 1.0) {
        ok = false;
        break;
      }
      weights.push_back(static_cast<int>(rounded));
    }
    if (ok) return weights;
  }
  throw Rejection("probabilities must be positive rationals with denominator <= 4096");
}

}  // namespace

SemicommutativeEmbedding embed_process(const ClassicalProcess& process) {
  const auto& probs = process.probabilities;
  if (probs.empty()) throw Rejection("semicommutative: empty sample space");
  if (process.paths.size() != probs.size()) {
    throw Rejection("semicommutative: one path per atom required");
  }
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw Rejection("semicommutative: probabilities must sum to 1 (got " +
                    std::to_string(total) + ")");
  }
  const std::vector<int> weights = rational_weights(probs);
  const std::size_t len = process.paths.front().size();
  for (const auto& path : process.paths) {
    if (path.size() != len || path.empty()) {
      throw Rejection("semicommutative: paths must share a nonzero length");
    }
    require_common_dim(path, "semicommutative");
    if (path.front().rows() != process.paths.front().front().rows()) {
      throw Rejection("semicommutative: paths must share a dimension");
    }
  }
  const int b = static_cast<int>(process.paths.front().front().rows());
  const int copies = std::accumulate(weights.begin(), weights.end(), 0);
  const int dim = copies * b;

  OperatorSequence seq;
  for (std::size_t n = 0; n < len; ++n) {
    Operator x = Operator::Zero(dim, dim);
    int at = 0;
    for (std::size_t w = 0; w < probs.size(); ++w) {
      for (int c = 0; c < weights[w]; ++c, at += b) x.block(at, at, b, b) = process.paths[w][n];
    }
    seq.push_back(std::move(x));
  }

  if (process.levels.empty()) throw Rejection("semicommutative: classical filtration is empty");
  std::vector<SubalgebraSpec> levels;
  for (const auto& cells : process.levels) {
    if (cells.size() != probs.size()) {
      throw Rejection("semicommutative: each level labels every atom");
    }
    ClassicalCells spec;
    spec.block_dim = b;
    for (std::size_t w = 0; w < probs.size(); ++w) {
      spec.cell_of_atom.insert(spec.cell_of_atom.end(), weights[w], cells[w]);
    }
    levels.emplace_back(std::move(spec));
  }
  return {std::move(seq), Filtration(std::move(levels)), weights};
}

RatioReport check_semicommutative(const ClassicalProcess& process, Exponent p, double q,
                                  int lag) {
  const SemicommutativeEmbedding emb = embed_process(process);
  RatioReport r = check_stein_pq(emb.sequence, emb.filtration, p, q, lag);
  r.id = InequalityId::kSemicommutative;
  return r;
}

}  // namespace ncstein
