#include "core/sampling.hpp"

#include <cmath>

namespace tracecvx {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

Matrix gaussian_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  Matrix g(rows, cols);
  // Fill in a fixed order so results only depend on the seed.
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const double re = nd(rng);
      const double im = nd(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

PsdMatrix wishart(Rng& rng, Index n, double shift) {
  const Matrix g = gaussian_matrix(rng, n, n);
  Matrix w = g * g.adjoint();
  if (shift != 0.0) w += shift * Matrix::Identity(n, n);
  return clamp_to_psd(w);
}

PsdMatrix random_density_matrix(Rng& rng, Index n) {
  const PsdMatrix w = wishart(rng, n);
  return w * (1.0 / w.trace());
}

HermitianMatrix random_hermitian(Rng& rng, Index n) {
  return HermitianMatrix::symmetrized(gaussian_matrix(rng, n, n));
}

Matrix haar_unitary(Rng& rng, Index n) {
  const Matrix g = gaussian_matrix(rng, n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double ad = std::abs(d);
    if (ad > 0.0) q.col(j) *= d / ad;
  }
  return q;
}

Eigen::VectorXcd random_unit_vector(Rng& rng, Index n) {
  Eigen::VectorXcd v = gaussian_matrix(rng, n, 1).col(0);
  return v / v.norm();
}

Matrix random_contraction(Rng& rng, Index n, double norm) {
  const Matrix g = gaussian_matrix(rng, n, n);
  return g * (norm / operator_norm(g));
}

}  // namespace tracecvx
