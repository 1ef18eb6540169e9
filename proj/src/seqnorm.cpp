#include "ncstein/seqnorm.hpp"

#include <algorithm>
#include <cmath>

namespace ncstein {

std::string to_string(BoundDirection b) {
  switch (b) {
    case BoundDirection::kExact: return "exact";
    case BoundDirection::kLower: return "lower";
    case BoundDirection::kUpper: return "upper";
  }
  return "?";
}

void require_nonempty(const OperatorSequence& seq, const char* who) {
  if (seq.empty()) throw Rejection(std::string(who) + ": empty sequence");
}

void require_common_dim(const OperatorSequence& seq, const char* who) {
  for (const Operator& x : seq) {
    validate_operator(x);
    if (x.rows() != seq.front().rows()) {
      throw Rejection(std::string(who) + ": items must share a common dimension");
    }
  }
}

void require_positive(const OperatorSequence& seq, const char* who) {
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (!is_psd(seq[k])) {
      throw Rejection(std::string(who) + ": item " + std::to_string(k) + " is not PSD");
    }
  }
}

bool is_zero_sequence(const OperatorSequence& seq) {
  return std::all_of(seq.begin(), seq.end(), [](const Operator& x) { return x.isZero(0.0); });
}

OperatorSequence adjoint_sequence(const OperatorSequence& seq) {
  OperatorSequence out;
  out.reserve(seq.size());
  for (const Operator& x : seq) out.push_back(x.adjoint());
  return out;
}

Operator sequence_sum(const OperatorSequence& seq) {
  Operator s = Operator::Zero(seq.front().rows(), seq.front().cols());
  for (const Operator& x : seq) s += x;
  return s;
}

Operator abs_power(const Operator& x, double q, ItemKind kind) {
  if (q == 2.0) return hermitian_part(x.adjoint() * x);
  if (kind == ItemKind::kPositive) return psd_power(x, q);
  return psd_power(abs_op(x), q);
}

namespace {

void check_column_args(const OperatorSequence& seq, double q, ItemKind kind, const char* who) {
  if (std::isinf(q)) throw Rejection(std::string(who) + ": q = inf is handled by linf_norm_positive");
  if (!(q >= 1.0)) throw Rejection(std::string(who) + ": q must satisfy q >= 1");
  require_nonempty(seq, who);
  require_common_dim(seq, who);
  if (kind == ItemKind::kPositive) require_positive(seq, who);
}

Operator power_sum(const OperatorSequence& seq, double q, ItemKind kind) {
  Operator s = Operator::Zero(seq.front().rows(), seq.front().cols());
  for (const Operator& x : seq) s += abs_power(x, q, kind);
  return hermitian_part(s);
}

double trace_route(const Operator& s, Exponent p, double q) {
  if (p.is_inf()) return std::pow(schatten_norm_psd(s, p), 1.0 / q);
  return std::pow(psd_trace_power(s, p.value() / q), 1.0 / p.value());
}

double root_route(const Operator& s, Exponent p, double q) {
  return schatten_norm_psd(psd_power(s, 1.0 / q), p);
}

}  // namespace

double column_q_norm_root_route(const OperatorSequence& seq, Exponent p, double q,
                                ItemKind kind) {
  check_column_args(seq, q, kind, "column_q_norm");
  return root_route(power_sum(seq, q, kind), p, q);
}

double column_q_norm_trace_route(const OperatorSequence& seq, Exponent p, double q,
                                 ItemKind kind) {
  check_column_args(seq, q, kind, "column_q_norm");
  return trace_route(power_sum(seq, q, kind), p, q);
}

double q_root_norm(const Operator& s, Exponent p, double q) {
  const bool trace_ok = p.is_inf() || p.value() >= q;
  return trace_ok ? trace_route(s, p, q) : root_route(s, p, q);
}

NormValue column_q_norm(const OperatorSequence& seq, Exponent p, double q, ItemKind kind) {
  check_column_args(seq, q, kind, "column_q_norm");
  if (is_zero_sequence(seq)) return NormValue::exact(0.0);
  return NormValue::exact(q_root_norm(power_sum(seq, q, kind), p, q));
}

NormValue row_2_norm(const OperatorSequence& seq, Exponent p) {
  return column_q_norm(adjoint_sequence(seq), p, 2.0, ItemKind::kGeneral);
}

namespace {

// Column norm C(a) = ||(sum a_n* a_n)^{1/2}||_p and its gradient with respect
// to the real inner product Re tau(g* da). The inverse power is regularized.
double column_value_grad(const OperatorSequence& a, double p, OperatorSequence* grad) {
  const int d = static_cast<int>(a.front().rows());
  Operator s = Operator::Zero(d, d);
  for (const Operator& x : a) s += x.adjoint() * x;
  const HermitianEig eig = hermitian_eig(hermitian_part(s));
  const Eigen::VectorXd ev = eig.eigenvalues.cwiseMax(0.0);
  const double top = ev.maxCoeff();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > 0.0) acc += std::pow(ev(i), p / 2.0);
  }
  const double value = std::pow(acc / d, 1.0 / p);
  if (grad) {
    grad->assign(a.size(), Operator::Zero(d, d));
    if (value > 0.0) {
      const double delta = 1e-12 * std::max(top, 1e-300);
      Eigen::VectorXd w(ev.size());
      for (Eigen::Index i = 0; i < ev.size(); ++i) w(i) = std::pow(ev(i) + delta, p / 2.0 - 1.0);
      const Operator m = eig.transition * w.cast<Complex>().asDiagonal() * eig.transition.adjoint();
      const double scale = std::pow(value, 1.0 - p);
      for (std::size_t n = 0; n < a.size(); ++n) (*grad)[n] = scale * a[n] * m;
    }
  }
  return value;
}

double split_objective(const OperatorSequence& x, const OperatorSequence& a, double p,
                       OperatorSequence* grad) {
  OperatorSequence b_adj(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) b_adj[n] = (x[n] - a[n]).adjoint();
  OperatorSequence gc, gr;
  const double c = column_value_grad(a, p, grad ? &gc : nullptr);
  const double r = column_value_grad(b_adj, p, grad ? &gr : nullptr);
  if (grad) {
    grad->resize(x.size());
    // d/da of R(x - a) is minus the adjoint of the column gradient at b*.
    for (std::size_t n = 0; n < x.size(); ++n) (*grad)[n] = gc[n] - gr[n].adjoint();
  }
  return c + r;
}

double sequence_inner(const OperatorSequence& u, const OperatorSequence& v) {
  double acc = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) acc += (u[n].adjoint() * v[n]).trace().real();
  return acc;
}

}  // namespace

NormValue crp_norm(const OperatorSequence& seq, Exponent p, const CrpOptions& opts) {
  require_nonempty(seq, "crp_norm");
  require_common_dim(seq, "crp_norm");
  if (is_zero_sequence(seq)) return NormValue::exact(0.0);
  if (p.is_inf() || p.value() >= 2.0) {
    return NormValue::exact(std::max(column_q_norm(seq, p, 2.0).value, row_2_norm(seq, p).value));
  }
  return crp_split_norm(seq, p, opts);
}

NormValue crp_split_norm(const OperatorSequence& seq, Exponent p, const CrpOptions& opts) {
  require_nonempty(seq, "crp_split_norm");
  require_common_dim(seq, "crp_split_norm");
  if (p.is_inf()) throw Rejection("crp_split_norm: p must be finite");
  if (is_zero_sequence(seq)) return NormValue::exact(0.0);
  const double column = column_q_norm(seq, p, 2.0).value;
  const double row = row_2_norm(seq, p).value;

  const double pv = p.value();
  const int d = static_cast<int>(seq.front().rows());
  OperatorSequence a(seq.size());
  for (std::size_t n = 0; n < seq.size(); ++n) a[n] = seq[n] * 0.5;

  double scale = 0.0;
  for (const Operator& x : seq) scale = std::max(scale, x.cwiseAbs().maxCoeff());
  double step = 0.1 * scale;

  OperatorSequence grad;
  double value = split_objective(seq, a, pv, &grad);
  int stalls = 0;
  for (int it = 0; it < opts.max_steps && stalls < 10; ++it) {
    const double gnorm2 = sequence_inner(grad, grad);
    if (gnorm2 <= 0.0) break;
    bool accepted = false;
    while (step > 1e-14 * std::max(scale, 1e-300)) {
      OperatorSequence trial(a.size());
      for (std::size_t n = 0; n < a.size(); ++n) trial[n] = a[n] - step * grad[n];
      const double v = split_objective(seq, trial, pv, nullptr);
      // Armijo condition on the Frobenius-scaled gradient.
      if (v <= value - 1e-4 * step * gnorm2 / d) {
        const double improvement = value - v;
        a = std::move(trial);
        value = split_objective(seq, a, pv, &grad);
        stalls = improvement < opts.rel_tol * value ? stalls + 1 : 0;
        step *= 1.5;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }

  SplittingWitness witness;
  witness.column_part = a;
  for (std::size_t n = 0; n < seq.size(); ++n) witness.row_part.push_back(seq[n] - a[n]);
  // The trivial splittings a = x and a = 0 are feasible too.
  if (column <= value && column <= row) {
    value = column;
    witness.column_part = seq;
    witness.row_part.assign(seq.size(), Operator::Zero(d, d));
  } else if (row < value) {
    value = row;
    witness.column_part.assign(seq.size(), Operator::Zero(d, d));
    witness.row_part = seq;
  }
  NormValue out{value, BoundDirection::kUpper, std::nullopt, {}};
  out.certificate = std::move(witness);
  return out;
}

NormValue l1_norm_positive(const OperatorSequence& seq, Exponent p) {
  require_nonempty(seq, "l1_norm_positive");
  require_common_dim(seq, "l1_norm_positive");
  require_positive(seq, "l1_norm_positive");
  if (is_zero_sequence(seq)) return NormValue::exact(0.0);
  return NormValue::exact(schatten_norm_psd(sequence_sum(seq), p));
}

}  // namespace ncstein
