#include "ncstein/sampling.hpp"

namespace ncstein {

SampleKind parse_sample_kind(const std::string& name) {
  if (name == "hermitian") return SampleKind::kHermitian;
  if (name == "psd") return SampleKind::kPsd;
  if (name == "unitary") return SampleKind::kUnitary;
  if (name == "projection-family") return SampleKind::kProjectionFamily;
  if (name == "adapted-positive") return SampleKind::kAdaptedPositive;
  throw Rejection("unknown sample kind '" + name + "'");
}

OperatorSequence random_positive_sequence(int dim, int length, std::mt19937_64& rng) {
  if (length < 1) throw Rejection("sequence length must be >= 1");
  OperatorSequence seq;
  seq.reserve(static_cast<std::size_t>(length));
  for (int k = 0; k < length; ++k) seq.push_back(random_psd(dim, rng));
  return seq;
}

OperatorSequence random_adapted_positive(const Filtration& filt, int length, int lag,
                                         std::mt19937_64& rng) {
  return project_adapted(random_positive_sequence(filt.dim(), length, rng), filt, lag);
}

Sample sample(SampleKind kind, int dim, std::uint64_t seed, const SampleParams& params) {
  if (dim < 1) throw Rejection("sample: dim must be >= 1");
  auto rng = make_rng(seed, static_cast<std::uint64_t>(kind));
  switch (kind) {
    case SampleKind::kHermitian: return random_hermitian(dim, rng);
    case SampleKind::kPsd: return random_psd(dim, rng);
    case SampleKind::kUnitary: return random_unitary(dim, rng);
    case SampleKind::kProjectionFamily: {
      const int rank = params.rank > 0 ? params.rank : dim / std::max(1, params.count);
      return random_projection_family(dim, params.count, rank, rng);
    }
    case SampleKind::kAdaptedPositive: {
      if (!params.filtration) throw Rejection("adapted-positive sample needs a filtration");
      if (params.filtration->dim() != dim) throw Rejection("filtration dim mismatch");
      return random_adapted_positive(*params.filtration, params.count, params.lag, rng);
    }
  }
  throw Rejection("unknown sample kind");
}

}  // namespace ncstein
