#pragma once

// Seeded random matrix ensembles.

#include <cstdint>
#include <random>

#include "core/matcore.hpp"

namespace tracecvx {

using Rng = std::mt19937_64;

/// Per-trial seed: splitmix64 mixing of (master, index). Trials seeded this
/// way are independent of execution order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// i.i.d. standard complex Gaussian entries (E|g|^2 = 1).
Matrix gaussian_matrix(Rng& rng, Index rows, Index cols);

/// Wishart sample G G* with square Gaussian G, optionally shifted by
/// shift * I for strict positivity.
PsdMatrix wishart(Rng& rng, Index n, double shift = 0.0);

/// Wishart sample normalized to unit trace (Hilbert-Schmidt ensemble).
PsdMatrix random_density_matrix(Rng& rng, Index n);

/// Random Hermitian matrix (G + G*)/2.
HermitianMatrix random_hermitian(Rng& rng, Index n);

/// Haar-distributed unitary via phase-corrected QR.
Matrix haar_unitary(Rng& rng, Index n);

/// Unit vector uniformly distributed on the complex sphere.
Eigen::VectorXcd random_unit_vector(Rng& rng, Index n);

/// Gaussian matrix rescaled to operator norm `norm`.
Matrix random_contraction(Rng& rng, Index n, double norm);

}  // namespace tracecvx
