#pragma once

// Models used throughout the examples and tests.

#include <cstdint>

#include "semrd/io.hpp"
#include "semrd/model.hpp"

namespace semrd::presets {

/// The 3-dimensional observation / 2-dimensional state toy model.
[[nodiscard]] GaussianSemanticModel toy_model();

/// 128-point circulant model: K_X first row [1, 0.4, 0, ..., 0, 0.4],
/// H first row [0.3, 0.3, 0.3, 0.3, 0, ..., 0], K_Z = 0.
[[nodiscard]] CirculantRows circulant_rows();

/// X ~ N(0, 2 I_64), Z ~ N(0, I_16) and H a 16 x 64 Rademacher matrix
/// with each entry zeroed with probability 0.95.
///
/// Recipe (portable across standard libraries): a std::mt19937_64 seeded
/// with `seed` is drawn twice per entry in row-major order. The first draw
/// u = (g >> 11) 2^-53 keeps the entry when u < 0.05; the lowest bit of the
/// second draw picks the sign (1 -> +1, 0 -> -1).
[[nodiscard]] GaussianSemanticModel sparse_model(std::uint64_t seed);

/// Binary symmetric state/observation pair with crossover 0.2 and Hamming
/// distortions on both sides.
[[nodiscard]] DiscreteSemanticSource binary_source();

}  // namespace semrd::presets
