#pragma once

// Dense complex-matrix kernel for the tracial space (M_d, tau) with the
// normalized trace tau(x) = Tr(x) / d.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncstein {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using OperatorSequence = std::vector<Operator>;

/// Raised whenever an input violates an operation's precondition.
class Rejection : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exponent p in [1, inf]; infinity is a distinguished value, not a large float.
class Exponent {
 public:
  constexpr Exponent() = default;
  explicit Exponent(double value);

  static constexpr Exponent infinity() { return Exponent(Tag{}); }

  bool is_inf() const { return inf_; }
  /// Finite value; +inf when is_inf().
  double value() const {
    return inf_ ? std::numeric_limits<double>::infinity() : value_;
  }
  /// 1/p with 1/inf = 0.
  double reciprocal() const { return inf_ ? 0.0 : 1.0 / value_; }

  std::string str() const;
  static Exponent parse(const std::string& text);

  friend bool operator==(const Exponent& a, const Exponent& b) {
    return a.inf_ == b.inf_ && (a.inf_ || a.value_ == b.value_);
  }

 private:
  struct Tag {};
  constexpr explicit Exponent(Tag) : inf_(true) {}

  double value_ = 1.0;
  bool inf_ = false;
};

/// 1/p + 1/p' = 1, with 1' = inf and inf' = 1.
Exponent conjugate_exponent(Exponent p);

/// Spectrum of a Hermitian operator, eigenvalues ascending.
struct HermitianEig {
  Eigen::VectorXd eigenvalues;
  Operator transition;  // columns are eigenvectors
};

/// Tolerance for ||h - h*||_inf accepted by hermitian_eig.
inline constexpr double kSymmetrizationTolerance = 1e-8;
/// Relative clamp for slightly negative eigenvalues of PSD inputs.
inline constexpr double kClampRelative = 1e-10;

void validate_operator(const Operator& x);
void require_same_dim(const Operator& a, const Operator& b);

double trace(const Operator& x);  // normalized, real part
Complex trace_complex(const Operator& x);

Operator hermitian_part(const Operator& x);
Operator identity(int dim);

/// Operator norm (largest singular value).
double operator_norm(const Operator& x);

HermitianEig hermitian_eig(const Operator& h);

/// Eigenvalues of (x + x*)/2, ascending.
Eigen::VectorXd hermitian_eigenvalues(const Operator& h);
double min_eigenvalue(const Operator& h);

bool is_psd(const Operator& x, double slack = 0.0);
double clamp_threshold(const Operator& x);

Operator abs_op(const Operator& x);

/// a^r for PSD a, r > 0; eigenvalues within the clamp threshold of zero are
/// treated as zero.
Operator psd_power(const Operator& a, double r);

/// tau(a^r) for PSD a and any r > 0, without forming a^r.
double psd_trace_power(const Operator& a, double r);

Eigen::VectorXd singular_values(const Operator& x);

double schatten_norm(const Operator& x, Exponent p);
/// Schatten norm of a PSD operator read off its spectrum.
double schatten_norm_psd(const Operator& a, Exponent p);

/// Moore-Penrose square root pseudo-inverse of a PSD operator; eigenvalues
/// below rel_cutoff * max eigenvalue are dropped.
Operator psd_pinv_sqrt(const Operator& a, double rel_cutoff = 1e-12);

// Seeded generators. Gaussian entries are standard complex normal.
Operator random_gaussian(int dim, std::mt19937_64& rng);
Operator random_hermitian(int dim, std::mt19937_64& rng);
Operator random_psd(int dim, std::mt19937_64& rng);
Operator random_unitary(int dim, std::mt19937_64& rng);
/// count pairwise-orthogonal projections of rank `rank` each (count*rank <= dim).
OperatorSequence random_projection_family(int dim, int count, int rank,
                                          std::mt19937_64& rng);

/// Deterministic stream derived from (seed, stream index).
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace ncstein
