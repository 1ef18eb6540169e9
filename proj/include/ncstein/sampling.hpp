#pragma once

// Seeded test-input generation over the kernel and filtration layers.

#include "ncstein/expectation.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace ncstein {

enum class SampleKind { kHermitian, kPsd, kUnitary, kProjectionFamily, kAdaptedPositive };

SampleKind parse_sample_kind(const std::string& name);

struct SampleParams {
  int count = 1;   // projection-family size / adapted-positive length
  int rank = 0;    // projection rank; 0 means dim / count
  int lag = 0;     // adapted-positive lag convention
  std::optional<Filtration> filtration;  // required for adapted-positive
};

using Sample = std::variant<Operator, OperatorSequence>;

/// Deterministic for fixed (kind, dim, seed, params).
Sample sample(SampleKind kind, int dim, std::uint64_t seed, const SampleParams& params = {});

/// N seeded PSD operators z*z.
OperatorSequence random_positive_sequence(int dim, int length, std::mt19937_64& rng);

/// Positive sequence adapted under `lag`: item k is E_{k+lag}(z_k* z_k).
OperatorSequence random_adapted_positive(const Filtration& filt, int length, int lag,
                                         std::mt19937_64& rng);

}  // namespace ncstein
