// Seeded generators for randomized property suites.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pobs/core_algebra.hpp"

namespace pobs::rnd {

using Rng = std::mt19937_64;

/// Independent stream for (seed, a, b, c); used so that parallel audit tasks
/// never share generator state.
Rng stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0, std::uint64_t c = 0);

double uniform(Rng& rng, double lo, double hi);
Complex gaussian_complex(Rng& rng);

Matrix complex_matrix(Index dim, Rng& rng);
Matrix hermitian(Index dim, Rng& rng);
/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix).
Matrix unitary(Index dim, Rng& rng);
/// V diag(spectrum) V^dagger with Haar V.
Matrix hermitian_with_spectrum(const std::vector<double>& spectrum, Rng& rng);
/// Spectrum drawn uniformly from (-pi, pi).
Matrix generatrix(Index dim, Rng& rng);
Vector state(Index dim, Rng& rng);
/// Full-rank density from a normalized Wishart draw.
Matrix density(Index dim, Rng& rng);

}  // namespace pobs::rnd
