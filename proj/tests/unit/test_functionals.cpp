#include <algorithm>
#include <array>
#include <cmath>

#include <doctest.h>

#include "core/functionals.hpp"
#include "core/sampling.hpp"
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

// ||(sum_j a_j^p)^{1/p}||_q for commuting diagonal inputs, entrywise.
double scalar_phi(const std::vector<std::vector<double>>& diags, double p, double q) {
  double total = 0.0;
  for (size_t i = 0; i < diags[0].size(); ++i) {
    double s = 0.0;
    for (const auto& d : diags) s += std::pow(d[i], p);
    total += std::pow(s, q / p);
  }
  return std::pow(total, 1.0 / q);
}

}  // namespace

TEST_CASE("phi with one argument is the Schatten norm") {
  Rng rng = seeded(301);
  const PsdMatrix a = wishart(rng, 3);
  for (double p : {0.5, 1.0, 1.7, 3.0}) {
    for (double q : {0.7, 1.0, 2.0}) {
      const std::array<PsdMatrix, 1> one{a};
      CHECK(rel_diff(phi(one, ExponentPair(p, q)), schatten_norm(a, q)) < 1e-12);
    }
  }
}

TEST_CASE("phi at p = q is the l_p sum of traces") {
  Rng rng = seeded(302);
  const std::array<PsdMatrix, 3> a{wishart(rng, 3), wishart(rng, 3), wishart(rng, 3)};
  for (double p : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    double s = 0.0;
    for (const PsdMatrix& x : a) s += trace_power(x, p);
    CHECK(rel_diff(std::pow(phi(a, ExponentPair(p, p)), p), s) < 1e-11);
  }
}

TEST_CASE("phi on diagonal inputs matches the scalar oracle") {
  const std::vector<std::vector<double>> d{{1.0, 2.0, 0.5}, {3.0, 0.25, 4.0}};
  const std::array<PsdMatrix, 2> a{psd_diag({1.0, 2.0, 0.5}), psd_diag({3.0, 0.25, 4.0})};
  for (auto [p, q] : {std::pair{1.5, 1.0}, {2.0, 3.0}, {0.5, 0.75}, {3.0, 1.0}}) {
    CHECK(rel_diff(phi(a, ExponentPair(p, q)), scalar_phi(d, p, q)) < 1e-13);
  }
}

TEST_CASE("phi rejects mixed dimensions") {
  const std::array<PsdMatrix, 2> a{PsdMatrix::identity(2), PsdMatrix::identity(3)};
  CHECK(code_of([&] { phi(a, ExponentPair(1.0, 1.0)); }) == ErrorCode::kDimMismatch);
}

TEST_CASE("property: phi is homogeneous, unitarily invariant and symmetric") {
  Rng rng = seeded(303);
  for (int rep = 0; rep < 20; ++rep) {
    const ExponentPair e(1.0 + 0.05 * rep, 1.0 + 0.2 * rep);
    std::array<PsdMatrix, 3> a{wishart(rng, 3), wishart(rng, 3), wishart(rng, 3)};
    const double base = phi(a, e);
    for (double t : {0.3, 2.5}) {
      const std::array<PsdMatrix, 3> ta{a[0] * t, a[1] * t, a[2] * t};
      CHECK(rel_diff(phi(ta, e), t * base) <= 1e-10 * std::max(1.0, t * base));
    }
    const Matrix u = haar_unitary(rng, 3);
    std::array<PsdMatrix, 3> ua;
    for (int j = 0; j < 3; ++j) ua[j] = PsdMatrix(HermitianMatrix::symmetrized(u * a[j].matrix() * u.adjoint()));
    CHECK(std::abs(phi(ua, e) - base) <= 1e-10 * base);
    std::swap(a[0], a[2]);
    CHECK(std::abs(phi(a, e) - base) <= 1e-12 * base);
  }
}

TEST_CASE("psi on block-diagonal inputs equals phi of the blocks") {
  // The block index sits in the traced factor: A = sum_j A_j (x) e_j e_j*.
  Rng rng = seeded(311);
  for (int m : {2, 3}) {
    std::vector<PsdMatrix> blocks;
    Matrix a = Matrix::Zero(3 * m, 3 * m);
    for (int j = 0; j < m; ++j) {
      blocks.push_back(wishart(rng, 3));
      Matrix e = Matrix::Zero(m, m);
      e(j, j) = 1.0;
      a += kron(blocks.back().matrix(), e);
    }
    const LabeledMatrix la = labeled({3, m}, a);
    for (auto [p, q] : {std::pair{1.5, 1.0}, {2.0, 3.0}, {0.5, 0.75}}) {
      const ExponentPair e(p, q);
      CHECK(rel_diff(psi(la, e), phi(blocks, e)) < 1e-12);
    }
  }
}

TEST_CASE("psi factorizes on product states and on the identity") {
  Rng rng = seeded(312);
  const PsdMatrix p = wishart(rng, 2);
  const PsdMatrix q = wishart(rng, 3);
  const LabeledMatrix pq = kron(p.hermitian(), q.hermitian());
  for (auto [pp, qq] : {std::pair{1.5, 1.0}, {2.0, 4.0}, {0.5, 0.5}}) {
    const double expected = schatten_norm(p, qq) * std::pow(trace_power(q, pp), 1.0 / pp);
    CHECK(rel_diff(psi(pq, ExponentPair(pp, qq)), expected) < 1e-12);
  }
  const LabeledMatrix id(TensorSpace({3, 2}), HermitianMatrix::identity(6));
  CHECK(rel_diff(psi(id, ExponentPair(1.5, 2.0)), std::pow(2.0, 1 / 1.5) * std::pow(3.0, 0.5)) <
        1e-13);
  const LabeledMatrix tri(TensorSpace({2, 2, 2}), HermitianMatrix::identity(8));
  CHECK(code_of([&] { psi(tri, ExponentPair(1.0, 1.0)); }) == ErrorCode::kNotBipartite);
}

TEST_CASE("upsilon examples and the two evaluation paths") {
  Rng rng = seeded(321);
  const PsdMatrix a = wishart(rng, 3);
  const Matrix id = Matrix::Identity(3, 3);
  CHECK(rel_diff(upsilon(a, id, ExponentPair(1.5, 2.5)), trace_power(a, 2.5)) < 1e-12);
  const Matrix b = gaussian_matrix(rng, 3, 3);
  const double expected = (b.adjoint() * matrix_power(a, 1.7).matrix() * b).trace().real();
  CHECK(rel_diff(upsilon(a, b, ExponentPair(1.7, 1.7)), expected) < 1e-12);

  for (int rep = 0; rep < 100; ++rep) {
    const Index n = 2 + rep % 3;
    const PsdMatrix x = wishart(rng, n);
    const Matrix y = gaussian_matrix(rng, n, n);
    const ExponentPair e(0.5 + 0.015 * rep, 0.6 + 0.03 * rep);
    const double v1 = upsilon(x, y, e);
    const double v2 = upsilon_altform(x, y, e);
    CHECK(std::abs(v1 - v2) <= 1e-9 * std::abs(v1));
  }
  CHECK(code_of([&] { upsilon(a, Matrix::Identity(2, 2), ExponentPair(1, 1)); }) ==
        ErrorCode::kDimMismatch);
}

TEST_CASE("variational objective: scalar arithmetic-geometric case") {
  // B* A^p B = 4 with p = 2, q = 1: objective (1/2)(4/x + x) is 2 at x = 2.
  const PsdMatrix a = psd_diag({2.0});
  const Matrix b = Matrix::Identity(1, 1);
  const ExponentPair e(2.0, 1.0);
  CHECK(variational_objective({a, b, e, psd_diag({2.0})}) == doctest::Approx(2.0));
  CHECK(variational_objective({a, b, e, psd_diag({3.0})}) > 2.0);
  const VariationalMinimizer opt = variational_minimizer(a, b, e);
  CHECK(opt.x.matrix()(0, 0).real() == doctest::Approx(2.0));
  CHECK(opt.shift == 0.0);
  CHECK(upsilon(a, b, e) == doctest::Approx(2.0));
}

TEST_CASE("variational minimizer of identities is the identity") {
  for (auto [p, q] : {std::pair{1.5, 1.0}, {0.5, 1.0}, {2.0, 0.5}}) {
    const VariationalMinimizer opt =
        variational_minimizer(PsdMatrix::identity(3), Matrix::Identity(3, 3), ExponentPair(p, q));
    CHECK(frob(opt.x.matrix() - Matrix::Identity(3, 3)) < 1e-13);
  }
}

TEST_CASE("property: variational minimizer matches upsilon and dominates probes") {
  Rng rng = seeded(331);
  int instance = 0;
  for (double r : {1.5, 2.0, 0.5, 0.75}) {
    for (Index n : {2, 3, 4}) {
      for (int rep = 0; rep < 3; ++rep, ++instance) {
        const double p = r > 1.0 ? 1.2 + 0.2 * rep : 0.5 + 0.2 * rep;
        const ExponentPair e(p, p / r);
        const PsdMatrix a = wishart(rng, n, 1e-6);
        const Matrix b = gaussian_matrix(rng, n, n);
        const VariationalCertificate cert =
            certify_variational_minimizer(a, b, e, 50, derive_seed(331, instance));
        CHECK(std::abs(cert.objective_at_minimizer - cert.upsilon) <= 1e-8 * cert.upsilon);
        CHECK(cert.best_probe_advantage <= 1e-8 * cert.upsilon);
        CHECK(cert.probes == 50);
      }
    }
  }
}

TEST_CASE("perturbing the minimizer raises the objective when r > 1") {
  Rng rng = seeded(332);
  const ExponentPair e(1.5, 1.0);
  const PsdMatrix a = wishart(rng, 3, 1e-6);
  const Matrix b = gaussian_matrix(rng, 3, 3);
  const VariationalMinimizer opt = variational_minimizer(a, b, e);
  const double best = upsilon(a, b, e);
  const PsdMatrix moved(HermitianMatrix::symmetrized(opt.x.matrix() + 0.05 * wishart(rng, 3).matrix()));
  CHECK(variational_objective({a, b, e, moved}) > best);
}

TEST_CASE("variational error paths") {
  const ExponentPair e(2.0, 1.0);
  const PsdMatrix singular = psd_diag({1.0, 0.0});
  CHECK(code_of([&] {
          variational_objective({PsdMatrix::identity(2), Matrix::Identity(2, 2), e, singular});
        }) == ErrorCode::kSingularProbe);
  CHECK(code_of([&] { variational_minimizer(singular, Matrix::Identity(2, 2), e); }) ==
        ErrorCode::kSingularCore);
  const VariationalMinimizer reg = variational_minimizer(singular, Matrix::Identity(2, 2), e, true);
  CHECK(reg.shift == doctest::Approx(1e-10));
  CHECK(reg.x.eigenvalues()(0) > 0.0);
  CHECK(code_of([&] { variational_minimizer(singular, Matrix::Identity(2, 2), ExponentPair(1, 1)); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("joint trace form examples") {
  Rng rng = seeded(341);
  const PsdMatrix a = psd_diag({0.5, 2.0, 3.0});
  const Matrix id = Matrix::Identity(3, 3);
  CHECK(rel_diff(joint_trace_form(a, a, id, 0.7, 0.6), trace_power(a, 1.3)) < 1e-13);
  CHECK(rel_diff(joint_trace_form(a, a, id, 1.6, 1.0 - 1.6), a.trace()) < 1e-13);
  const PsdMatrix w = wishart(rng, 3);
  const Matrix u = haar_unitary(rng, 3);
  CHECK(rel_diff(joint_trace_form(w, wishart(rng, 3), u, 1.0, 0.0), w.trace()) < 1e-12);
}

TEST_CASE("vectorization convention on small diagonal and random cases") {
  const PsdMatrix a1 = psd_diag({2.0});
  const PsdMatrix b1 = psd_diag({3.0});
  Matrix k1(1, 1);
  k1 << Complex(0.5, 0.25);
  CHECK(rel_diff(joint_trace_form_vectorized(a1, b1, k1, 1.0, 1.0),
                 joint_trace_form(a1, b1, k1, 1.0, 1.0)) < 1e-15);
  Matrix k2(2, 2);
  k2 << 1, Complex(0, 2), 3, 4;
  const PsdMatrix a2 = psd_diag({1.0, 2.0});
  const PsdMatrix b2 = psd_diag({3.0, 5.0});
  CHECK(rel_diff(joint_trace_form_vectorized(a2, b2, k2, 1.5, -0.5),
                 joint_trace_form(a2, b2, k2, 1.5, -0.5)) < 1e-13);
  CHECK(vectorize(k2)(1) == std::conj(k2(1, 0)));

  Rng rng = seeded(342);
  for (int rep = 0; rep < 50; ++rep) {
    const Index n = 2 + rep % 3;
    const PsdMatrix a = wishart(rng, n, 1e-6);
    const PsdMatrix b = wishart(rng, n, 1e-6);
    const Matrix k = gaussian_matrix(rng, n, n);
    const double s = 0.3 + 0.03 * rep;
    const double t = 1.0 - 1.7 * s;
    const double direct = joint_trace_form(a, b, k, s, t);
    CHECK(std::abs(joint_trace_form_vectorized(a, b, k, s, t) - direct) <=
          1e-9 * std::abs(direct));
  }
  CHECK(code_of([&] { joint_trace_form(psd_diag({1.0, 0.0}), a2, k2, -1.0, 1.0); }) ==
        ErrorCode::kSingularPower);
}

TEST_CASE("dilation examples") {
  const Dilation id = dilate_contraction(Matrix::Identity(3, 3));
  CHECK(frob(id.unitary - Matrix::Identity(6, 6)) < 1e-14);
  const Dilation zero = dilate_contraction(Matrix::Zero(3, 3));
  CHECK(frob(zero.unitary.adjoint() * zero.unitary - Matrix::Identity(6, 6)) < 1e-14);
  CHECK(frob(zero.unitary.topLeftCorner(3, 3)) == 0.0);
  CHECK(frob(dilate_contraction(Matrix::Zero(3, 3)).unitary - zero.unitary) == 0.0);

  Matrix big = Matrix::Identity(2, 2) * 1.01;
  CHECK(code_of([&] { dilate_contraction(big); }) == ErrorCode::kNotAContraction);
}

TEST_CASE("property: dilation is unitary and preserves the trace form") {
  Rng rng = seeded(351);
  for (int rep = 0; rep < 30; ++rep) {
    const Index n = 2 + rep % 3;
    const Matrix k = random_contraction(rng, n, rep % 5 == 0 ? 1.0 : 0.9);
    const Dilation d = dilate_contraction(k);
    CHECK(frob(d.unitary.adjoint() * d.unitary - Matrix::Identity(2 * n, 2 * n)) <= 1e-9);
    CHECK(frob(d.unitary.topLeftCorner(n, n) - k) == 0.0);
    const PsdMatrix a = wishart(rng, n, 1e-6);
    const PsdMatrix b = wishart(rng, n, 1e-6);
    const TraceIdentity ti = dilation_trace_identity(a, b, k, 1.4, -0.4);
    CHECK(std::abs(ti.original - ti.dilated) <= 1e-9 * std::abs(ti.original));
  }
  // A rank-deficient contraction exercises the kernel completion.
  Matrix singular = Matrix::Zero(3, 3);
  singular(0, 1) = 0.5;
  const Dilation d = dilate_contraction(singular);
  CHECK(frob(d.unitary.adjoint() * d.unitary - Matrix::Identity(6, 6)) <= 1e-12);
}

TEST_CASE("skew information examples") {
  const PsdMatrix rho = psd_diag({0.3, 0.7});
  CHECK(std::abs(skew_information(rho, diag({1.0, -2.0})).difference_form) < 1e-15);
  Rng rng = seeded(361);
  const SkewInformation mixed =
      skew_information(PsdMatrix::identity(3) * (1.0 / 3.0), random_hermitian(rng, 3));
  CHECK(std::abs(mixed.difference_form) < 1e-14);

  const Eigen::VectorXcd v = random_unit_vector(rng, 3);
  const HermitianMatrix k = random_hermitian(rng, 3);
  const PsdMatrix pure(Matrix(v * v.adjoint()));
  const Complex kv = v.dot(k.matrix() * v);
  const Complex k2v = v.dot(k.matrix() * k.matrix() * v);
  const double variance = k2v.real() - kv.real() * kv.real();
  const SkewInformation si = skew_information(pure, k);
  CHECK(std::abs(si.difference_form - variance) <= 1e-12 * (1 + variance));

  CHECK(code_of([&] { skew_information(psd_diag({0.5, 0.6}), diag({1.0, 2.0})); }) ==
        ErrorCode::kNotADensityMatrix);
}

TEST_CASE("property: skew information is nonnegative with commutator ratio 2") {
  Rng rng = seeded(362);
  for (int rep = 0; rep < 30; ++rep) {
    const PsdMatrix rho = random_density_matrix(rng, 3);
    const SkewInformation si = skew_information(rho, random_hermitian(rng, 3));
    CHECK(si.difference_form >= -1e-10);
    CHECK(std::abs(si.ratio - 2.0) < 1e-9);
  }
}
