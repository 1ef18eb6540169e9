#pragma once

// Subalgebras of M_d, the trace-preserving conditional expectations onto
// them, and increasing filtrations.

#include "ncstein/opcore.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ncstein {

/// Block-diagonal subalgebra over contiguous index blocks.
struct Pinching {
  std::vector<int> block_sizes;
};

/// M_{D_keep} (x) 1 inside M_{D_keep} (x) M_{D_drop}; the leading `retained`
/// factors are kept. Index order is row-major with the first factor slowest.
struct TensorFactor {
  std::vector<int> local_dims;
  int retained = 0;
};

/// L_inf(Omega_cells) (x) M_b: `cell_of_atom.size()` equally weighted atoms,
/// each carrying a b x b block; atoms sharing a cell label are averaged.
struct ClassicalCells {
  std::vector<int> cell_of_atom;
  int block_dim = 1;
};

class SubalgebraSpec {
 public:
  using Variant = std::variant<Pinching, TensorFactor, ClassicalCells>;

  SubalgebraSpec(Pinching p);
  SubalgebraSpec(TensorFactor t);
  SubalgebraSpec(ClassicalCells c);

  int dim() const { return dim_; }
  const Variant& variant() const { return variant_; }
  std::string describe() const;

  /// Full algebra / scalars helpers.
  static SubalgebraSpec full(int dim);
  static SubalgebraSpec scalars(int dim);

 private:
  Variant variant_;
  int dim_ = 0;
};

Operator cond_exp(const Operator& x, const SubalgebraSpec& spec);

/// True when the algebra of `smaller` is contained in that of `larger`
/// (decided structurally).
bool is_subalgebra_of(const SubalgebraSpec& smaller, const SubalgebraSpec& larger);

struct AxiomResiduals {
  double projection = 0.0;      // ||E(E x) - E x||_inf
  double bimodule = 0.0;        // ||E(a x b) - a E(x) b||_inf
  double trace = 0.0;           // |tau(E x) - tau(x)|
  double positivity = 0.0;      // max(0, -min eig E(psd))
  double adjoint = 0.0;         // ||E(x*) - E(x)*||_inf
  double contractivity = 0.0;   // max over p in {1,2,3,inf} of excess
  std::vector<double> contractivity_by_p;  // same order as kContractivityExponents

  double max_residual() const;
};

extern const std::vector<Exponent> kContractivityExponents;

AxiomResiduals axiom_residuals(const SubalgebraSpec& spec, int trials, std::uint64_t seed);

class Filtration {
 public:
  explicit Filtration(std::vector<SubalgebraSpec> levels);

  int dim() const { return levels_.front().dim(); }
  int size() const { return static_cast<int>(levels_.size()); }
  const SubalgebraSpec& level(int n) const;
  const std::vector<SubalgebraSpec>& levels() const { return levels_; }

  Operator expect(int n, const Operator& x) const { return cond_exp(x, level(n)); }

 private:
  std::vector<SubalgebraSpec> levels_;
};

enum class FiltrationKind { kDyadicPinching, kTensor, kCorner };

std::string to_string(FiltrationKind kind);
FiltrationKind parse_filtration_kind(const std::string& name);

/// dyadic: dim = 2^N, level n has blocks of size 2^n (n = 0..N).
/// tensor: level n retains the first n of `local_dims` (n = 0..k).
/// corner: level n has a leading block of size n+1, singletons after
///         (n = 0..dim-1), so E_n compresses onto the first n+1 coordinates.
Filtration make_filtration(FiltrationKind kind, int dim,
                           const std::vector<int>& local_dims = {});

/// max over sampled x, m, n of ||E_m(E_n x) - E_min(m,n) x||_inf.
double tower_residual(const Filtration& filt, int trials, std::uint64_t seed);

struct AdaptedCheck {
  bool adapted = false;
  double residual = 0.0;
};

/// Item k of the sequence carries index n = k + lag and must lie in level n.
AdaptedCheck is_adapted(const OperatorSequence& seq, const Filtration& filt, int lag);

/// (E_{k+lag}(x_k))_k: the closest adapted sequence under the lag convention.
OperatorSequence project_adapted(const OperatorSequence& seq, const Filtration& filt, int lag);

/// Level applied by the Stein-type checkers to item k: E_{n-lag}(x_n) with
/// n = k + lag is level k for either lag.
inline int expectation_level(int item) { return item; }

inline constexpr double kAdaptedTolerance = 1e-10;

}  // namespace ncstein
