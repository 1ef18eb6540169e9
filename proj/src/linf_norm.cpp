#include "ncstein/seqnorm.hpp"

#include <algorithm>
#include <cmath>

namespace ncstein {

namespace {

// Surrogate for p' = inf during ascent; the certificate uses the exact norm.
constexpr double kInfSurrogate = 64.0;

double psd_norm_finite(const Operator& y, double r) {
  if (r == 1.0) return std::max(0.0, trace(y));
  return std::pow(psd_trace_power(y, r), 1.0 / r);
}

Operator gram_sum(const OperatorSequence& z) {
  Operator y = Operator::Zero(z.front().rows(), z.front().cols());
  for (const Operator& zn : z) y += zn.adjoint() * zn;
  return hermitian_part(y);
}

double pairing(const OperatorSequence& x, const OperatorSequence& z) {
  double acc = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) acc += trace(z[n] * x[n] * z[n].adjoint());
  return acc;
}

struct AscentState {
  OperatorSequence z;
  double objective = 0.0;
};

// Rescales z so that ||sum z_n* z_n||_r = 1 and returns the objective.
double normalize(const OperatorSequence& x, OperatorSequence& z, double r) {
  const double d = psd_norm_finite(gram_sum(z), r);
  if (!(d > 0.0)) return -1.0;
  const double s = 1.0 / std::sqrt(d);
  for (Operator& zn : z) zn *= s;
  return pairing(x, z);
}

AscentState ascend(const OperatorSequence& x, double r, double x_scale, std::mt19937_64& rng,
                   const LinfOptions& opts) {
  const int dim = static_cast<int>(x.front().rows());
  AscentState st;
  st.z.reserve(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) st.z.push_back(random_gaussian(dim, rng));
  st.objective = normalize(x, st.z, r);

  double step = 0.5 / x_scale;
  double window_start = st.objective;
  int accepted = 0;
  for (int it = 0; it < opts.max_iters; ++it) {
    const Operator y = gram_sum(st.z);
    const Operator w = r == 1.0 ? identity(dim) : psd_power(y, r - 1.0);
    OperatorSequence grad(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) grad[n] = st.z[n] * (x[n] - st.objective * w);

    bool moved = false;
    for (int tries = 0; tries < 40; ++tries) {
      OperatorSequence trial(x.size());
      for (std::size_t n = 0; n < x.size(); ++n) trial[n] = st.z[n] + step * grad[n];
      const double f = normalize(x, trial, r);
      if (f > st.objective) {
        st.z = std::move(trial);
        st.objective = f;
        step *= 1.3;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    if (++accepted % 20 == 0) {
      if (st.objective - window_start <= opts.rel_tol * std::abs(st.objective)) break;
      window_start = st.objective;
    }
  }
  return st;
}

// Sequentially raises w by (x_n - w)_+; each step keeps the earlier
// dominations, so the result dominates every x_n.
Operator repair_majorant(const OperatorSequence& x, const Operator& w) {
  Operator out = w;
  for (const Operator& xn : x) {
    const HermitianEig eig = hermitian_eig(hermitian_part(xn - out));
    const Eigen::VectorXd pos = eig.eigenvalues.cwiseMax(0.0);
    out += eig.transition * pos.cast<Complex>().asDiagonal() * eig.transition.adjoint();
  }
  return hermitian_part(out);
}

}  // namespace

DualCertificate evaluate_dual(const OperatorSequence& seq, const OperatorSequence& duals,
                              Exponent p) {
  if (duals.size() != seq.size()) throw Rejection("evaluate_dual: length mismatch");
  DualCertificate cert;
  cert.duals = duals;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    cert.objective += (seq[n] * duals[n]).trace().real() / static_cast<double>(seq[n].rows());
  }
  cert.feasibility = schatten_norm_psd(sequence_sum(duals), conjugate_exponent(p));
  return cert;
}

std::optional<std::pair<double, FactorizationWitness>> factorization_bound(
    const OperatorSequence& seq, const Operator& w, Exponent p) {
  const Operator inv_sqrt = psd_pinv_sqrt(w);
  const Operator sqrt_w = psd_power(w, 0.5);
  double c = 0.0;
  OperatorSequence ys;
  ys.reserve(seq.size());
  for (const Operator& x : seq) {
    Operator y = hermitian_part(inv_sqrt * x * inv_sqrt);
    const double scale = std::max(1.0, operator_norm(x));
    if (operator_norm(sqrt_w * y * sqrt_w - x) > 1e-9 * scale) return std::nullopt;
    c = std::max(c, hermitian_eigenvalues(y).maxCoeff());
    ys.push_back(std::move(y));
  }
  if (!(c > 0.0)) return std::nullopt;
  FactorizationWitness fw;
  fw.a = psd_power(c * w, 0.5);
  fw.b = fw.a;
  for (Operator& y : ys) fw.contractions.push_back(y / c);
  return std::make_pair(c * schatten_norm_psd(w, p), std::move(fw));
}

NormValue LinfBracket::as_side() const {
  NormValue out = lower;
  out.bracket_upper = upper.value;
  return out;
}

LinfBracket linf_norm_positive(const OperatorSequence& seq, Exponent p, const LinfOptions& opts) {
  require_nonempty(seq, "linf_norm_positive");
  require_common_dim(seq, "linf_norm_positive");
  require_positive(seq, "linf_norm_positive");
  if (opts.restarts < 1) throw Rejection("linf_norm_positive: restarts must be >= 1");
  if (is_zero_sequence(seq)) return {NormValue::exact(0.0), NormValue::exact(0.0)};

  const Exponent pc = conjugate_exponent(p);
  const double r = pc.is_inf() ? kInfSurrogate : pc.value();
  double x_scale = 0.0;
  for (const Operator& x : seq) x_scale = std::max(x_scale, operator_norm(x));

  std::vector<AscentState> runs(static_cast<std::size_t>(opts.restarts));
#pragma omp parallel for schedule(static) if (opts.parallel)
  for (int k = 0; k < opts.restarts; ++k) {
    auto rng = make_rng(opts.seed, static_cast<std::uint64_t>(k));
    runs[static_cast<std::size_t>(k)] = ascend(seq, r, x_scale, rng, opts);
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    if (runs[k].objective > runs[best].objective) best = k;
  }

  // Lower end: the best dual, renormalized with the exact conjugate norm.
  OperatorSequence duals;
  for (const Operator& zn : runs[best].z) duals.push_back(hermitian_part(zn.adjoint() * zn));
  DualCertificate cert = evaluate_dual(seq, duals, p);
  if (cert.feasibility > 1.0) {
    for (Operator& y : cert.duals) y /= cert.feasibility;
    cert = evaluate_dual(seq, cert.duals, p);
  }

  // Upper end: the canonical majorant sum x_n, and the stationarity candidate
  // F * Y^{p'-1} recovered from the dual (blended with the sum for support).
  const Operator s = sequence_sum(seq);
  std::vector<Operator> candidates{s};
  const Operator y = sequence_sum(cert.duals);
  const Operator kkt = r == 1.0 ? identity(y.rows()) * cert.objective
                                : psd_power(y, r - 1.0) * cert.objective;
  for (double blend : {0.0, 1e-9, 1e-6, 1e-3}) {
    const Operator w0 = kkt + blend * s;
    candidates.push_back(w0);
    candidates.push_back(repair_majorant(seq, w0));
  }

  std::optional<std::pair<double, FactorizationWitness>> best_upper;
  for (const Operator& w : candidates) {
    auto fb = factorization_bound(seq, w, p);
    if (fb && (!best_upper || fb->first < best_upper->first)) best_upper = std::move(fb);
  }

  LinfBracket out;
  out.lower = {cert.objective, BoundDirection::kLower, std::nullopt, {}};
  out.lower.certificate = std::move(cert);
  // The sum candidate always factors, so best_upper is set.
  out.upper = {best_upper->first, BoundDirection::kUpper, std::nullopt, {}};
  out.upper.certificate = std::move(best_upper->second);
  return out;
}

}  // namespace ncstein
