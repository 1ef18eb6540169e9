#include "ncstein/opcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ncstein {

Exponent::Exponent(double value) {
  if (std::isnan(value) || value < 1.0) {
    throw Rejection("exponent must satisfy p >= 1, got " + std::to_string(value));
  }
  if (std::isinf(value)) {
    inf_ = true;
  } else {
    value_ = value;
  }
}

std::string Exponent::str() const {
  if (inf_) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

Exponent Exponent::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Rejection("cannot parse exponent '" + text + "'");
  }
  if (used != text.size()) throw Rejection("cannot parse exponent '" + text + "'");
  return Exponent(v);
}

Exponent conjugate_exponent(Exponent p) {
  if (p.is_inf()) return Exponent(1.0);
  if (p.value() == 1.0) return Exponent::infinity();
  return Exponent(p.value() / (p.value() - 1.0));
}

void validate_operator(const Operator& x) {
  if (x.rows() < 1 || x.rows() != x.cols()) {
    throw Rejection("operator must be square with dim >= 1, got " +
                    std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
  if (!x.allFinite()) throw Rejection("operator has non-finite entries");
}

void require_same_dim(const Operator& a, const Operator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Rejection("dimension mismatch: " + std::to_string(a.rows()) + " vs " +
                    std::to_string(b.rows()));
  }
}

Complex trace_complex(const Operator& x) {
  return x.trace() / static_cast<double>(x.rows());
}

double trace(const Operator& x) { return trace_complex(x).real(); }

Operator hermitian_part(const Operator& x) {
  return (x + x.adjoint()) * 0.5;
}

Operator identity(int dim) { return Operator::Identity(dim, dim); }

Eigen::VectorXd singular_values(const Operator& x) {
  Eigen::JacobiSVD<Operator> svd(x);
  return svd.singularValues();
}

double operator_norm(const Operator& x) {
  if (x.size() == 0) return 0.0;
  return singular_values(x).maxCoeff();
}

HermitianEig hermitian_eig(const Operator& h) {
  if (h.rows() != h.cols()) {
    throw Rejection("hermitian_eig: non-square input " + std::to_string(h.rows()) +
                    "x" + std::to_string(h.cols()));
  }
  const Operator skew = h - h.adjoint();
  const double residual = operator_norm(skew);
  const double scale = std::max(1.0, operator_norm(h));
  if (residual > kSymmetrizationTolerance * scale) {
    std::ostringstream os;
    os << "hermitian_eig: input is not Hermitian (||h - h*|| = " << residual << ")";
    throw Rejection(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian_part(h));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eig: eigensolver failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXd hermitian_eigenvalues(const Operator& h) {
  Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian_part(h),
                                                 Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double min_eigenvalue(const Operator& h) { return hermitian_eigenvalues(h)(0); }

double clamp_threshold(const Operator& x) {
  const double norm = x.size() == 0 ? 0.0 : hermitian_eigenvalues(x).cwiseAbs().maxCoeff();
  return kClampRelative * std::max(1.0, norm);
}

bool is_psd(const Operator& x, double slack) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(x);
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (operator_norm(x - x.adjoint()) > kSymmetrizationTolerance * scale) return false;
  return ev(0) >= -(kClampRelative * scale + slack);
}

namespace {

Operator reassemble(const Operator& u, const Eigen::VectorXd& values) {
  Operator out = u * values.cast<Complex>().asDiagonal() * u.adjoint();
  return hermitian_part(out);
}

Eigen::VectorXd clamped_spectrum(const Eigen::VectorXd& ev, const char* who) {
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  const double eps = kClampRelative * scale;
  if (ev(0) < -eps) {
    std::ostringstream os;
    os << who << ": input is not PSD (min eigenvalue " << ev(0) << ")";
    throw Rejection(os.str());
  }
  return ev.cwiseMax(0.0);
}

}  // namespace

Operator abs_op(const Operator& x) {
  validate_operator(x);
  const HermitianEig eig = hermitian_eig(x.adjoint() * x);
  return reassemble(eig.transition, eig.eigenvalues.cwiseMax(0.0).cwiseSqrt());
}

Operator psd_power(const Operator& a, double r) {
  validate_operator(a);
  if (!(r > 0.0)) throw Rejection("psd_power: exponent must be positive");
  const HermitianEig eig = hermitian_eig(a);
  Eigen::VectorXd ev = clamped_spectrum(eig.eigenvalues, "psd_power");
  if (r == 1.0) return hermitian_part(a);
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) > 0.0 ? std::pow(ev(i), r) : 0.0;
  return reassemble(eig.transition, ev);
}

double psd_trace_power(const Operator& a, double r) {
  if (!(r > 0.0)) throw Rejection("psd_trace_power: exponent must be positive");
  const Eigen::VectorXd ev = clamped_spectrum(hermitian_eigenvalues(a), "psd_trace_power");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > 0.0) acc += std::pow(ev(i), r);
  }
  return acc / static_cast<double>(ev.size());
}

namespace {

// (mean s_k^p)^{1/p} for nonnegative s, scaled against overflow.
double power_mean(const Eigen::VectorXd& s, Exponent p) {
  if (s.size() == 0) return 0.0;
  const double top = s.maxCoeff();
  if (p.is_inf() || top == 0.0) return top;
  const double pv = p.value();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i) / top, pv);
  return top * std::pow(acc / static_cast<double>(s.size()), 1.0 / pv);
}

}  // namespace

double schatten_norm(const Operator& x, Exponent p) {
  validate_operator(x);
  return power_mean(singular_values(x), p);
}

double schatten_norm_psd(const Operator& a, Exponent p) {
  validate_operator(a);
  return power_mean(hermitian_eigenvalues(a).cwiseAbs(), p);
}

Operator psd_pinv_sqrt(const Operator& a, double rel_cutoff) {
  const HermitianEig eig = hermitian_eig(a);
  Eigen::VectorXd ev = clamped_spectrum(eig.eigenvalues, "psd_pinv_sqrt");
  const double cutoff = rel_cutoff * ev.maxCoeff();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    ev(i) = (ev(i) > cutoff && ev(i) > 0.0) ? 1.0 / std::sqrt(ev(i)) : 0.0;
  }
  return reassemble(eig.transition, ev);
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x6e63u};
  return std::mt19937_64(seq);
}

Operator random_gaussian(int dim, std::mt19937_64& rng) {
  if (dim < 1) throw Rejection("dimension must be >= 1");
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Operator g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

Operator random_hermitian(int dim, std::mt19937_64& rng) {
  return hermitian_part(random_gaussian(dim, rng));
}

Operator random_psd(int dim, std::mt19937_64& rng) {
  const Operator z = random_gaussian(dim, rng);
  return hermitian_part(z.adjoint() * z);
}

Operator random_unitary(int dim, std::mt19937_64& rng) {
  const Operator g = random_gaussian(dim, rng);
  Eigen::HouseholderQR<Operator> qr(g);
  Operator q = qr.householderQ() * identity(dim);
  const Operator r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Phase fix makes the distribution Haar.
  for (int j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= mag > 0.0 ? d / mag : Complex(1.0);
  }
  return q;
}

OperatorSequence random_projection_family(int dim, int count, int rank,
                                          std::mt19937_64& rng) {
  if (count < 1 || rank < 1 || static_cast<long>(count) * rank > dim) {
    throw Rejection("projection family needs count >= 1, rank >= 1, count*rank <= dim");
  }
  const Operator u = random_unitary(dim, rng);
  OperatorSequence out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const Operator v = u.middleCols(k * rank, rank);
    out.push_back(hermitian_part(v * v.adjoint()));
  }
  return out;
}

}  // namespace ncstein
