#include <set>

#include <doctest.h>

#include "core/sampling.hpp"
#include "core/tensor.hpp"
#include "helpers.hpp"

using namespace tracecvx;
using namespace tracecvx::test;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

// Tr[(Tr_factor A) B] through the defining identity, with B lifted by
// local tensoring on the remaining factors.
Complex adjoint_side(const LabeledMatrix& a, const Matrix& b, int factor) {
  const TensorSpace& s = a.space();
  const Index d = s.factor_dim(factor);
  // Reorder so that the traced factor is last, then lift B (x) I.
  std::vector<int> order;
  for (int k = 1; k <= static_cast<int>(s.num_factors()); ++k) {
    if (k != factor) order.push_back(k);
  }
  order.push_back(factor);
  const Matrix moved = permute_factors(a.matrix(), s, order);
  const Matrix lifted = kron(b, Matrix::Identity(d, d));
  return (moved * lifted).trace();
}

}  // namespace

TEST_CASE("kron examples") {
  CHECK(kron(Matrix::Identity(2, 2), Matrix::Identity(3, 3)) == Matrix::Identity(6, 6));
  const LabeledMatrix d = kron(diag({1.0, 2.0}), diag({3.0, 4.0}));
  CHECK(frob(d.matrix() - diag({3.0, 4.0, 6.0, 8.0}).matrix()) == 0.0);
  CHECK(d.space() == TensorSpace({2, 2}));

  Rng rng = seeded(101);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = gaussian_matrix(rng, 2, 2);
    const Matrix b = gaussian_matrix(rng, 3, 3);
    const Matrix c = gaussian_matrix(rng, 2, 2);
    const Matrix e = gaussian_matrix(rng, 3, 3);
    CHECK(std::abs(kron(a, b).trace() - a.trace() * b.trace()) <= 1e-10 * (1 + std::abs(a.trace() * b.trace())));
    CHECK(relative_frobenius_error(kron(a, b) * kron(c, e), kron(a * c, b * e)) <= 1e-12);
  }
}

TEST_CASE("TensorSpace validation") {
  CHECK_THROWS_AS(TensorSpace({0, 2}), Error);
  const TensorSpace s({2, 3, 4});
  CHECK(s.total_dim() == 24);
  CHECK(s.without(2) == TensorSpace({2, 4}));
  CHECK(code_of([&] { s.factor_dim(4); }) == ErrorCode::kBadFactorIndex);
  CHECK(code_of([&] { LabeledMatrix(TensorSpace({2, 2}), HermitianMatrix::identity(3)); }) ==
        ErrorCode::kDimMismatch);
}

TEST_CASE("partial_trace of a product state") {
  Rng rng = seeded(111);
  const PsdMatrix p = wishart(rng, 2);
  const PsdMatrix q = wishart(rng, 3);
  const LabeledMatrix pq = kron(p.hermitian(), q.hermitian());
  const LabeledMatrix t2 = partial_trace(pq, 2);
  CHECK(t2.space() == TensorSpace({2}));
  CHECK(relative_frobenius_error(t2.matrix(), q.trace() * p.matrix()) <= 1e-13);
  const LabeledMatrix t1 = partial_trace(pq, 1);
  CHECK(relative_frobenius_error(t1.matrix(), p.trace() * q.matrix()) <= 1e-13);
}

TEST_CASE("tracing out every factor leaves the trace") {
  Rng rng = seeded(112);
  const LabeledMatrix a(TensorSpace({2, 3}), random_hermitian(rng, 6));
  const LabeledMatrix once = partial_trace(a, 1);
  const LabeledMatrix twice = partial_trace(once, 1);
  CHECK(twice.dim() == 1);
  CHECK(std::abs(twice.matrix()(0, 0) - a.matrix().trace()) < 1e-12);
  const LabeledMatrix both = partial_trace(a, std::vector<int>{2, 1});
  CHECK(std::abs(both.matrix()(0, 0) - a.matrix().trace()) < 1e-12);
}

TEST_CASE("partial_trace satisfies the defining adjoint identity") {
  Rng rng = seeded(113);
  for (const std::vector<Index>& dims :
       {std::vector<Index>{2, 2}, std::vector<Index>{2, 3}, std::vector<Index>{2, 3, 2}}) {
    const TensorSpace space(dims);
    const LabeledMatrix a(space, random_hermitian(rng, space.total_dim()));
    for (int factor = 1; factor <= static_cast<int>(dims.size()); ++factor) {
      const LabeledMatrix reduced = partial_trace(a, factor);
      CHECK(std::abs(reduced.matrix().trace() - a.matrix().trace()) < 1e-12);
      for (int rep = 0; rep < 20; ++rep) {
        const Matrix b = gaussian_matrix(rng, reduced.dim(), reduced.dim());
        const Complex lhs = (reduced.matrix() * b).trace();
        const Complex rhs = adjoint_side(a, b, factor);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
      }
    }
  }
}

TEST_CASE("partial_trace rejects bad factor indices") {
  const LabeledMatrix a(TensorSpace({2, 2}), HermitianMatrix::identity(4));
  CHECK(code_of([&] { partial_trace(a, 0); }) == ErrorCode::kBadFactorIndex);
  CHECK(code_of([&] { partial_trace(a, 3); }) == ErrorCode::kBadFactorIndex);
}

TEST_CASE("property: partial traces commute and preserve positivity") {
  Rng rng = seeded(114);
  for (int rep = 0; rep < 20; ++rep) {
    const LabeledMatrix rho(TensorSpace({2, 3, 2}), wishart(rng, 12).hermitian());
    const LabeledMatrix r3a = partial_trace(partial_trace(rho, 1), 1);
    const LabeledMatrix r3b = partial_trace(partial_trace(rho, 2), 1);
    CHECK(frob(r3a.matrix() - r3b.matrix()) <= 1e-12 * (1 + frob(r3a.matrix())));
    for (int f = 1; f <= 3; ++f) CHECK_NOTHROW(partial_trace(rho, f).psd());
  }
}

TEST_CASE("property: partial_trace is linear") {
  Rng rng = seeded(115);
  const TensorSpace space({3, 2});
  const Matrix a = random_hermitian(rng, 6).matrix();
  const Matrix b = random_hermitian(rng, 6).matrix();
  const Matrix lhs = partial_trace(Matrix(2.0 * a - 0.5 * b), space, 2);
  const Matrix rhs = 2.0 * partial_trace(a, space, 2) - 0.5 * partial_trace(b, space, 2);
  CHECK(frob(lhs - rhs) < 1e-12);
}

TEST_CASE("embed examples") {
  Rng rng = seeded(121);
  const PsdMatrix p = wishart(rng, 2);
  const PsdMatrix q = wishart(rng, 3);
  const LabeledMatrix pq = kron(p.hermitian(), q.hermitian());
  CHECK(frob(embed(pq, Matrix::Identity(3, 3), 2).matrix() - pq.matrix()) < 1e-14);

  const Matrix u = haar_unitary(rng, 3);
  const LabeledMatrix conj = embed(pq, u, 2);
  const Matrix expected = kron(p.matrix(), u.adjoint() * q.matrix() * u);
  CHECK(relative_frobenius_error(conj.matrix(), expected) <= 1e-12);

  const LabeledMatrix a(TensorSpace({2, 3}), random_hermitian(rng, 6));
  const RealVector before = eigh(a.hermitian()).eigenvalues;
  const RealVector after = eigh(embed(a, u, 2).hermitian()).eigenvalues;
  CHECK((before - after).norm() <= 1e-12 * (1 + before.norm()));

  CHECK(code_of([&] { embed(a, u, 1); }) == ErrorCode::kDimMismatch);
  CHECK(code_of([&] { embed(a, u, 3); }) == ErrorCode::kBadFactorIndex);
}

TEST_CASE("permute_factors moves factors and is undone by the inverse order") {
  Rng rng = seeded(131);
  const Matrix a = gaussian_matrix(rng, 2, 2);
  const Matrix b = gaussian_matrix(rng, 3, 3);
  const Matrix c = gaussian_matrix(rng, 2, 2);
  const TensorSpace space({2, 3, 2});
  const Matrix abc = kron(kron(a, b), c);
  const Matrix cab = permute_factors(abc, space, {3, 1, 2});
  CHECK(relative_frobenius_error(cab, kron(kron(c, a), b)) <= 1e-14);
  const TensorSpace moved({2, 2, 3});
  CHECK(relative_frobenius_error(permute_factors(cab, moved, {2, 3, 1}), abc) <= 1e-14);
  CHECK_THROWS_AS(permute_factors(abc, space, {1, 1, 2}), Error);
}

TEST_CASE("Uhlmann group sizes and elements") {
  const size_t expected[] = {0, 2, 8, 48, 384};
  for (int n = 1; n <= 4; ++n) {
    const UhlmannGroup g(n);
    CHECK(g.size() == expected[n]);
    std::set<std::vector<int>> seen;
    for (const SignedPermutation& w : g) {
      const Matrix m = w.matrix();
      CHECK(m.adjoint() * m == Matrix::Identity(n, n));
      for (Index i = 0; i < n; ++i) {
        int nonzero = 0;
        for (Index j = 0; j < n; ++j) {
          const Complex x = m(i, j);
          CHECK(x.imag() == 0.0);
          CHECK((x.real() == 0.0 || x.real() == 1.0 || x.real() == -1.0));
          nonzero += x.real() != 0.0;
        }
        CHECK(nonzero == 1);
      }
      std::vector<int> key = w.perm;
      key.insert(key.end(), w.signs.begin(), w.signs.end());
      seen.insert(key);
    }
    CHECK(seen.size() == g.size());
  }
  const UhlmannGroup g1(1);
  CHECK(g1.element(0).matrix()(0, 0) + g1.element(1).matrix()(0, 0) == Complex(0.0, 0.0));
  CHECK(code_of([] { UhlmannGroup(5); }) == ErrorCode::kGroupTooLarge);
}

TEST_CASE("uhlmann_average examples") {
  Rng rng = seeded(141);
  const PsdMatrix p = wishart(rng, 2);
  const PsdMatrix q = wishart(rng, 2);
  const LabeledMatrix avg = uhlmann_average(kron(p.hermitian(), q.hermitian()), 2);
  const Matrix expected = kron(Matrix((q.trace() / 2.0) * p.matrix()), Matrix::Identity(2, 2));
  CHECK(relative_frobenius_error(avg.matrix(), expected) <= 1e-12);

  // Tr_2 A = I, built from I/2 (x) I plus a part traceless on factor 2.
  const Matrix traceless = kron(gaussian_matrix(rng, 2, 2), Matrix(diag({1.0, -1.0}).matrix()));
  const Matrix base = kron(Matrix::Identity(2, 2), Matrix::Identity(2, 2)) * 0.5;
  const LabeledMatrix iso = labeled({2, 2}, base + traceless + traceless.adjoint());
  CHECK(frob(partial_trace(iso, 2).matrix() - Matrix::Identity(2, 2)) < 1e-12);
  CHECK(frob(uhlmann_average(iso, 2).matrix() - 0.5 * Matrix::Identity(4, 4)) < 1e-12);
}

TEST_CASE("property: uhlmann_average equals the normalized partial trace") {
  Rng rng = seeded(142);
  for (Index n : {2, 3, 4}) {
    for (int rep = 0; rep < 5; ++rep) {
      const TensorSpace space({2, n});
      const LabeledMatrix a(space, wishart(rng, 2 * n).hermitian());
      const LabeledMatrix avg = uhlmann_average(a, 2);
      const Matrix expected =
          kron(Matrix(partial_trace(a, 2).matrix() / static_cast<double>(n)),
               Matrix::Identity(n, n));
      CHECK(relative_frobenius_error(avg.matrix(), expected) <= 1e-12);
      for (const SignedPermutation& w : UhlmannGroup(static_cast<int>(n))) {
        const Matrix l = local_operator(space, w.matrix(), 2);
        CHECK(frob(l * avg.matrix() - avg.matrix() * l) <= 1e-10 * frob(avg.matrix()));
      }
    }
  }
  const LabeledMatrix first(TensorSpace({3, 2}), wishart(rng, 6).hermitian());
  const Matrix expected = kron(Matrix::Identity(3, 3), Matrix(partial_trace(first, 1).matrix() / 3.0));
  CHECK(relative_frobenius_error(uhlmann_average(first, 1).matrix(), expected) <= 1e-12);
  const LabeledMatrix big(TensorSpace({2, 5}), HermitianMatrix::identity(10));
  CHECK(code_of([&] { uhlmann_average(big, 2); }) == ErrorCode::kGroupTooLarge);
}

TEST_CASE("sample_uhlmann_average approximates the exact average") {
  Rng rng = seeded(143);
  const LabeledMatrix a(TensorSpace({2, 3}), wishart(rng, 6).hermitian());
  const LabeledMatrix exact = uhlmann_average(a, 2);
  const LabeledMatrix s1 = sample_uhlmann_average(a, 2, 5);
  const LabeledMatrix s2 = sample_uhlmann_average(a, 2, 5);
  CHECK(s1.matrix() == s2.matrix());
  // 480 draws: a loose Monte-Carlo band.
  CHECK(relative_frobenius_error(s1.matrix(), exact.matrix()) < 0.2);
}
