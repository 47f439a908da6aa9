#pragma once

// Shared generators and oracles for the unit tests. Every generator takes an
// explicit seed so failures replay exactly.

#include <cmath>
#include <initializer_list>
#include <vector>

#include <doctest.h>

#include "core/matcore.hpp"
#include "core/sampling.hpp"
#include "core/tensor.hpp"

namespace tracecvx::test {

inline Rng seeded(std::uint64_t case_seed) { return Rng(derive_seed(0x7e57, case_seed)); }

inline HermitianMatrix diag(std::initializer_list<double> d) {
  RealVector v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return HermitianMatrix::diagonal(v);
}

inline PsdMatrix psd_diag(std::initializer_list<double> d) { return PsdMatrix(diag(d)); }

inline LabeledMatrix labeled(std::vector<Index> dims, const Matrix& m) {
  return LabeledMatrix(TensorSpace(std::move(dims)), HermitianMatrix::symmetrized(m));
}

inline double rel_diff(double actual, double expected) {
  return std::abs(actual - expected) / std::max(1.0, std::abs(expected));
}

inline double frob(const Matrix& a) { return a.norm(); }

/// Random PSD with operator norm 1.
inline PsdMatrix unit_wishart(Rng& rng, Index n) {
  const PsdMatrix w = wishart(rng, n);
  return w * (1.0 / w.max_eigenvalue());
}

}  // namespace tracecvx::test
