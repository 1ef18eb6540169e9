#include "ncstein/expectation.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace ncstein {

namespace {

int product(const std::vector<int>& dims, std::size_t begin, std::size_t end) {
  int p = 1;
  for (std::size_t i = begin; i < end; ++i) p *= dims[i];
  return p;
}

std::vector<int> block_starts(const Pinching& p) {
  std::vector<int> starts;
  int pos = 0;
  for (int s : p.block_sizes) {
    starts.push_back(pos);
    pos += s;
  }
  return starts;
}

}  // namespace

SubalgebraSpec::SubalgebraSpec(Pinching p) {
  if (p.block_sizes.empty()) throw Rejection("pinching needs at least one block");
  for (int s : p.block_sizes) {
    if (s < 1) throw Rejection("pinching blocks must be nonempty");
  }
  dim_ = std::accumulate(p.block_sizes.begin(), p.block_sizes.end(), 0);
  variant_ = std::move(p);
}

SubalgebraSpec::SubalgebraSpec(TensorFactor t) {
  if (t.local_dims.empty()) throw Rejection("tensor factor needs at least one local dim");
  for (int d : t.local_dims) {
    if (d < 1) throw Rejection("tensor local dims must be positive");
  }
  if (t.retained < 0 || t.retained > static_cast<int>(t.local_dims.size())) {
    throw Rejection("tensor retained count must lie in [0, number of factors]");
  }
  dim_ = product(t.local_dims, 0, t.local_dims.size());
  variant_ = std::move(t);
}

SubalgebraSpec::SubalgebraSpec(ClassicalCells c) {
  if (c.cell_of_atom.empty()) throw Rejection("classical cells need at least one atom");
  if (c.block_dim < 1) throw Rejection("classical block dim must be positive");
  dim_ = static_cast<int>(c.cell_of_atom.size()) * c.block_dim;
  variant_ = std::move(c);
}

SubalgebraSpec SubalgebraSpec::full(int dim) { return SubalgebraSpec(Pinching{{dim}}); }

SubalgebraSpec SubalgebraSpec::scalars(int dim) {
  return SubalgebraSpec(TensorFactor{{dim}, 0});
}

std::string SubalgebraSpec::describe() const {
  std::ostringstream os;
  if (const auto* p = std::get_if<Pinching>(&variant_)) {
    os << "pinching[";
    for (std::size_t i = 0; i < p->block_sizes.size(); ++i) {
      os << (i ? "," : "") << p->block_sizes[i];
    }
    os << "]";
  } else if (const auto* t = std::get_if<TensorFactor>(&variant_)) {
    os << "tensor[";
    for (std::size_t i = 0; i < t->local_dims.size(); ++i) {
      os << (i ? "," : "") << t->local_dims[i];
    }
    os << "]/" << t->retained;
  } else {
    const auto& c = std::get<ClassicalCells>(variant_);
    os << "cells[";
    for (std::size_t i = 0; i < c.cell_of_atom.size(); ++i) {
      os << (i ? "," : "") << c.cell_of_atom[i];
    }
    os << "]x" << c.block_dim;
  }
  return os.str();
}

Operator cond_exp(const Operator& x, const SubalgebraSpec& spec) {
  validate_operator(x);
  const int d = spec.dim();
  if (x.rows() != d) {
    throw Rejection("cond_exp: operator dim " + std::to_string(x.rows()) +
                    " does not match subalgebra dim " + std::to_string(d));
  }
  Operator out = Operator::Zero(d, d);
  if (const auto* p = std::get_if<Pinching>(&spec.variant())) {
    int pos = 0;
    for (int s : p->block_sizes) {
      out.block(pos, pos, s, s) = x.block(pos, pos, s, s);
      pos += s;
    }
  } else if (const auto* t = std::get_if<TensorFactor>(&spec.variant())) {
    const int keep = product(t->local_dims, 0, t->retained);
    const int drop = d / keep;
    const double inv = 1.0 / drop;
    for (int i = 0; i < keep; ++i) {
      for (int j = 0; j < keep; ++j) {
        Complex acc = 0.0;
        for (int k = 0; k < drop; ++k) acc += x(i * drop + k, j * drop + k);
        acc *= inv;
        for (int k = 0; k < drop; ++k) out(i * drop + k, j * drop + k) = acc;
      }
    }
  } else {
    const auto& c = std::get<ClassicalCells>(spec.variant());
    const int b = c.block_dim;
    std::vector<int> cells = c.cell_of_atom;
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    for (int cell : cells) {
      Operator avg = Operator::Zero(b, b);
      int members = 0;
      for (std::size_t a = 0; a < c.cell_of_atom.size(); ++a) {
        if (c.cell_of_atom[a] != cell) continue;
        const int at = static_cast<int>(a) * b;
        avg += x.block(at, at, b, b);
        ++members;
      }
      avg /= static_cast<double>(members);
      for (std::size_t a = 0; a < c.cell_of_atom.size(); ++a) {
        if (c.cell_of_atom[a] != cell) continue;
        const int at = static_cast<int>(a) * b;
        out.block(at, at, b, b) = avg;
      }
    }
  }
  return out;
}

bool is_subalgebra_of(const SubalgebraSpec& smaller, const SubalgebraSpec& larger) {
  if (smaller.dim() != larger.dim()) return false;
  const auto& sv = smaller.variant();
  const auto& lv = larger.variant();
  if (std::holds_alternative<Pinching>(sv) && std::holds_alternative<Pinching>(lv)) {
    // Every block of the smaller algebra's partition must sit inside a block
    // of the larger one: the coarse boundaries are a subset of the fine ones.
    const auto fine = block_starts(std::get<Pinching>(sv));
    const auto coarse = block_starts(std::get<Pinching>(lv));
    const std::set<int> fine_set(fine.begin(), fine.end());
    return std::all_of(coarse.begin(), coarse.end(),
                       [&](int s) { return fine_set.count(s) > 0; });
  }
  if (std::holds_alternative<TensorFactor>(sv) && std::holds_alternative<TensorFactor>(lv)) {
    const auto& a = std::get<TensorFactor>(sv);
    const auto& b = std::get<TensorFactor>(lv);
    return a.local_dims == b.local_dims && a.retained <= b.retained;
  }
  if (std::holds_alternative<ClassicalCells>(sv) && std::holds_alternative<ClassicalCells>(lv)) {
    const auto& a = std::get<ClassicalCells>(sv);
    const auto& b = std::get<ClassicalCells>(lv);
    if (a.block_dim != b.block_dim || a.cell_of_atom.size() != b.cell_of_atom.size()) {
      return false;
    }
    // Finer partition on the larger side.
    for (std::size_t i = 0; i < a.cell_of_atom.size(); ++i) {
      for (std::size_t j = 0; j < a.cell_of_atom.size(); ++j) {
        if (b.cell_of_atom[i] == b.cell_of_atom[j] && a.cell_of_atom[i] != a.cell_of_atom[j]) {
          return false;
        }
      }
    }
    return true;
  }
  // Mixed families: decide membership numerically, E_large(E_small x) = E_small x.
  auto rng = make_rng(0x5eedu, static_cast<std::uint64_t>(smaller.dim()));
  for (int t = 0; t < 4; ++t) {
    const Operator y = cond_exp(random_gaussian(smaller.dim(), rng), smaller);
    if (operator_norm(cond_exp(y, larger) - y) > 1e-10 * std::max(1.0, operator_norm(y))) {
      return false;
    }
  }
  return true;
}

const std::vector<Exponent> kContractivityExponents = {Exponent(1.0), Exponent(2.0),
                                                       Exponent(3.0), Exponent::infinity()};

double AxiomResiduals::max_residual() const {
  return std::max({projection, bimodule, trace, positivity, adjoint, contractivity});
}

AxiomResiduals axiom_residuals(const SubalgebraSpec& spec, int trials, std::uint64_t seed) {
  if (trials < 1) throw Rejection("axiom_residuals: trials must be >= 1");
  const int d = spec.dim();
  auto rng = make_rng(seed, 0xa110u);
  AxiomResiduals r;
  r.contractivity_by_p.assign(kContractivityExponents.size(), 0.0);
  for (int t = 0; t < trials; ++t) {
    const Operator x = random_gaussian(d, rng);
    const Operator a = cond_exp(random_gaussian(d, rng), spec);
    const Operator b = cond_exp(random_gaussian(d, rng), spec);
    const Operator psd = random_psd(d, rng);

    const Operator ex = cond_exp(x, spec);
    r.projection = std::max(r.projection, operator_norm(cond_exp(ex, spec) - ex));
    r.bimodule = std::max(r.bimodule, operator_norm(cond_exp(a * x * b, spec) - a * ex * b));
    r.trace = std::max(r.trace, std::abs(trace_complex(ex) - trace_complex(x)));
    r.positivity = std::max(r.positivity, -min_eigenvalue(cond_exp(psd, spec)));
    r.adjoint = std::max(r.adjoint, operator_norm(cond_exp(x.adjoint(), spec) - ex.adjoint()));
    for (std::size_t k = 0; k < kContractivityExponents.size(); ++k) {
      const Exponent p = kContractivityExponents[k];
      const double excess = schatten_norm(ex, p) - schatten_norm(x, p);
      r.contractivity_by_p[k] = std::max(r.contractivity_by_p[k], excess);
    }
  }
  r.positivity = std::max(0.0, r.positivity);
  for (double& c : r.contractivity_by_p) c = std::max(0.0, c);
  r.contractivity =
      *std::max_element(r.contractivity_by_p.begin(), r.contractivity_by_p.end());
  return r;
}

Filtration::Filtration(std::vector<SubalgebraSpec> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw Rejection("filtration needs at least one level");
  for (std::size_t n = 0; n + 1 < levels_.size(); ++n) {
    if (levels_[n].dim() != levels_[n + 1].dim()) {
      throw Rejection("filtration levels must share a dimension");
    }
    if (!is_subalgebra_of(levels_[n], levels_[n + 1])) {
      throw Rejection("filtration is not increasing at level " + std::to_string(n));
    }
  }
}

const SubalgebraSpec& Filtration::level(int n) const {
  if (n < 0 || n >= size()) {
    throw Rejection("filtration level " + std::to_string(n) + " out of range [0, " +
                    std::to_string(size() - 1) + "]");
  }
  return levels_[static_cast<std::size_t>(n)];
}

std::string to_string(FiltrationKind kind) {
  switch (kind) {
    case FiltrationKind::kDyadicPinching: return "dyadic";
    case FiltrationKind::kTensor: return "tensor";
    case FiltrationKind::kCorner: return "corner";
  }
  return "?";
}

FiltrationKind parse_filtration_kind(const std::string& name) {
  if (name == "dyadic" || name == "dyadic-pinching") return FiltrationKind::kDyadicPinching;
  if (name == "tensor") return FiltrationKind::kTensor;
  if (name == "corner") return FiltrationKind::kCorner;
  throw Rejection("unknown filtration kind '" + name + "' (dyadic|tensor|corner)");
}

Filtration make_filtration(FiltrationKind kind, int dim, const std::vector<int>& local_dims) {
  std::vector<SubalgebraSpec> levels;
  switch (kind) {
    case FiltrationKind::kDyadicPinching: {
      if (dim < 1 || (dim & (dim - 1)) != 0) {
        throw Rejection("dyadic filtration needs dim a power of 2, got " + std::to_string(dim));
      }
      for (int block = 1; block <= dim; block *= 2) {
        levels.emplace_back(Pinching{std::vector<int>(dim / block, block)});
      }
      break;
    }
    case FiltrationKind::kTensor: {
      if (local_dims.empty()) throw Rejection("tensor filtration needs local_dims");
      const int total = product(local_dims, 0, local_dims.size());
      if (dim != 0 && dim != total) {
        throw Rejection("tensor filtration: product of local_dims (" + std::to_string(total) +
                        ") does not equal dim " + std::to_string(dim));
      }
      for (int r = 0; r <= static_cast<int>(local_dims.size()); ++r) {
        levels.emplace_back(TensorFactor{local_dims, r});
      }
      break;
    }
    case FiltrationKind::kCorner: {
      if (dim < 1) throw Rejection("corner filtration needs dim >= 1");
      for (int n = 0; n < dim; ++n) {
        std::vector<int> blocks{n + 1};
        blocks.resize(static_cast<std::size_t>(dim - n), 1);
        levels.emplace_back(Pinching{blocks});
      }
      break;
    }
  }
  return Filtration(std::move(levels));
}

double tower_residual(const Filtration& filt, int trials, std::uint64_t seed) {
  auto rng = make_rng(seed, 0x70e5u);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Operator x = random_gaussian(filt.dim(), rng);
    for (int m = 0; m < filt.size(); ++m) {
      for (int n = 0; n < filt.size(); ++n) {
        const Operator lhs = filt.expect(m, filt.expect(n, x));
        const Operator rhs = filt.expect(std::min(m, n), x);
        worst = std::max(worst, operator_norm(lhs - rhs));
      }
    }
  }
  return worst;
}

namespace {

void check_lag(int lag) {
  if (lag != 0 && lag != 1) throw Rejection("lag must be 0 or 1");
}

}  // namespace

AdaptedCheck is_adapted(const OperatorSequence& seq, const Filtration& filt, int lag) {
  check_lag(lag);
  if (static_cast<int>(seq.size()) + lag > filt.size()) {
    throw Rejection("is_adapted: sequence of length " + std::to_string(seq.size()) +
                    " needs " + std::to_string(seq.size() + lag) + " filtration levels, have " +
                    std::to_string(filt.size()));
  }
  AdaptedCheck out{true, 0.0};
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const Operator& x = seq[k];
    const double res = operator_norm(filt.expect(static_cast<int>(k) + lag, x) - x);
    out.residual = std::max(out.residual, res);
  }
  out.adapted = out.residual <= kAdaptedTolerance;
  return out;
}

OperatorSequence project_adapted(const OperatorSequence& seq, const Filtration& filt, int lag) {
  check_lag(lag);
  if (static_cast<int>(seq.size()) + lag > filt.size()) {
    throw Rejection("project_adapted: sequence too long for filtration under lag " +
                    std::to_string(lag));
  }
  OperatorSequence out;
  out.reserve(seq.size());
  for (std::size_t k = 0; k < seq.size(); ++k) {
    out.push_back(filt.expect(static_cast<int>(k) + lag, seq[k]));
  }
  return out;
}

}  // namespace ncstein
