#include <set>

#include <doctest.h>

#include "core/parallel.hpp"
#include "core/sampling.hpp"
#include "helpers.hpp"

using namespace tracecvx;
using namespace tracecvx::test;

TEST_CASE("derive_seed is a fixed function of (master, index)") {
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  std::set<std::uint64_t> seen;
  for (std::uint64_t m = 0; m < 4; ++m) {
    for (std::uint64_t i = 0; i < 256; ++i) seen.insert(derive_seed(m, i));
  }
  CHECK(seen.size() == 4 * 256);
}

TEST_CASE("generators replay from the same seed") {
  Rng a(derive_seed(1, 2));
  Rng b(derive_seed(1, 2));
  CHECK(wishart(a, 3).matrix() == wishart(b, 3).matrix());
  CHECK(haar_unitary(a, 3) == haar_unitary(b, 3));
}

TEST_CASE("Wishart samples are PSD and the shift is applied") {
  Rng rng = seeded(201);
  for (int rep = 0; rep < 20; ++rep) {
    const PsdMatrix w = wishart(rng, 4, 1e-6);
    CHECK(w.eigenvalues()(0) >= 1e-6 * (1.0 - 1e-6));
    CHECK(w.eigen_floor() >= 0.0);
  }
}

TEST_CASE("Wishart entries have the intended second moment") {
  // E Tr(G G*) = n^2 for standard complex Gaussian G.
  Rng rng = seeded(202);
  const int draws = 4000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += wishart(rng, 3).trace();
  CHECK(sum / draws == doctest::Approx(9.0).epsilon(0.03));
}

TEST_CASE("random density matrices have unit trace") {
  Rng rng = seeded(203);
  for (int rep = 0; rep < 20; ++rep) {
    const PsdMatrix rho = random_density_matrix(rng, 8);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-13);
  }
}

TEST_CASE("Haar unitaries, unit vectors and contractions") {
  Rng rng = seeded(204);
  for (Index n : {1, 2, 5}) {
    const Matrix u = haar_unitary(rng, n);
    CHECK(frob(u.adjoint() * u - Matrix::Identity(n, n)) < 1e-12);
    CHECK(std::abs(random_unit_vector(rng, n).norm() - 1.0) < 1e-14);
    CHECK(operator_norm(random_contraction(rng, n, 0.7)) == doctest::Approx(0.7).epsilon(1e-12));
  }
  const HermitianMatrix h = random_hermitian(rng, 4);
  CHECK(frob(h.matrix() - h.matrix().adjoint()) == 0.0);
}

TEST_CASE("parallel_for fills every slot and propagates exceptions") {
  std::vector<int> out(100, 0);
  parallel_for(out.size(), 4, [&](size_t i) { out[i] = static_cast<int>(i) * 2; });
  for (size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i) * 2);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}
