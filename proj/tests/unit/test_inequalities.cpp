#include <cmath>
#include <map>

#include <doctest.h>

#include "core/inequalities.hpp"
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

const TensorSpace kTri({2, 2, 2});

LabeledMatrix random_tripartite(Rng& rng, const TensorSpace& space = kTri) {
  return LabeledMatrix(space, wishart(rng, space.total_dim()).hermitian());
}

DensityMatrix random_state(Rng& rng, const TensorSpace& space = kTri) {
  return DensityMatrix(LabeledMatrix(space, random_density_matrix(rng, space.total_dim()).hermitian()));
}

// Diagonal entries a[i][j][k] on H1 (x) H2 (x) H3, leftmost most significant.
struct Diagonal3 {
  Index d1, d2, d3;
  std::vector<double> a;

  double at(Index i, Index j, Index k) const { return a[(i * d2 + j) * d3 + k]; }
  LabeledMatrix matrix() const {
    RealVector v(static_cast<Index>(a.size()));
    for (size_t i = 0; i < a.size(); ++i) v(static_cast<Index>(i)) = a[i];
    return LabeledMatrix(TensorSpace({d1, d2, d3}), HermitianMatrix::diagonal(v));
  }
};

Diagonal3 random_diagonal(Rng& rng, Index d1, Index d2, Index d3, bool normalize) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Diagonal3 d{d1, d2, d3, std::vector<double>(static_cast<size_t>(d1 * d2 * d3))};
  double total = 0.0;
  for (double& x : d.a) total += (x = u(rng));
  if (normalize) {
    for (double& x : d.a) x /= total;
  }
  return d;
}

// sum_k (sum_j (sum_i a^q)^{p/q})^{q/p}  vs  sum_k sum_i (sum_j a^p)^{q/p}.
std::pair<double, double> scalar_minkowski(const Diagonal3& d, double p, double q) {
  double lhs = 0.0;
  double rhs = 0.0;
  for (Index k = 0; k < d.d3; ++k) {
    double outer = 0.0;
    for (Index j = 0; j < d.d2; ++j) {
      double inner = 0.0;
      for (Index i = 0; i < d.d1; ++i) inner += std::pow(d.at(i, j, k), q);
      outer += std::pow(inner, p / q);
    }
    lhs += std::pow(outer, q / p);
    for (Index i = 0; i < d.d1; ++i) {
      double inner = 0.0;
      for (Index j = 0; j < d.d2; ++j) inner += std::pow(d.at(i, j, k), p);
      rhs += std::pow(inner, q / p);
    }
  }
  return {lhs, rhs};
}

double shannon(const std::map<std::vector<Index>, double>& dist) {
  double h = 0.0;
  for (const auto& [key, pr] : dist) {
    if (pr > 0.0) h -= pr * std::log(pr);
  }
  return h;
}

// I(1;2|3) = H(13) + H(23) - H(123) - H(3) from the joint distribution.
double classical_cmi(const Diagonal3& d) {
  std::map<std::vector<Index>, double> p13, p23, p123, p3;
  for (Index i = 0; i < d.d1; ++i) {
    for (Index j = 0; j < d.d2; ++j) {
      for (Index k = 0; k < d.d3; ++k) {
        const double x = d.at(i, j, k);
        p13[{i, k}] += x;
        p23[{j, k}] += x;
        p123[{i, j, k}] += x;
        p3[{k}] += x;
      }
    }
  }
  return shannon(p13) + shannon(p23) - shannon(p123) - shannon(p3);
}

}  // namespace

TEST_CASE("DensityMatrix validation") {
  Rng rng = seeded(501);
  CHECK_NOTHROW(random_state(rng));
  const LabeledMatrix unnormalized = random_tripartite(rng);
  CHECK(code_of([&] { DensityMatrix{unnormalized}; }) == ErrorCode::kNotADensityMatrix);
  const LabeledMatrix single(TensorSpace({4}), HermitianMatrix::identity(4) * 0.25);
  CHECK(code_of([&] { DensityMatrix{single}; }) == ErrorCode::kNotADensityMatrix);
  const LabeledMatrix negative(TensorSpace({2, 1}), diag({1.5, -0.5}));
  CHECK(code_of([&] { DensityMatrix{negative}; }) == ErrorCode::kNotPsd);
}

TEST_CASE("minkowski directions") {
  CHECK(minkowski_direction(ExponentPair(2.0, 1.0)) == Direction::kLE);
  CHECK(minkowski_direction(ExponentPair(1.5, 1.5)) == Direction::kLE);
  CHECK(minkowski_direction(ExponentPair(0.5, 3.0)) == Direction::kGE);
  CHECK(minkowski_direction(ExponentPair(1.0, 1.0)) == Direction::kLE);
  CHECK(minkowski_direction(ExponentPair(2.5, 1.0)) == Direction::kUnchecked);
  CHECK(minkowski_direction(ExponentPair(1.5, 2.0)) == Direction::kUnchecked);
}

TEST_CASE("minkowski at p = q = 1 is an identity") {
  Rng rng = seeded(511);
  const LabeledMatrix a = random_tripartite(rng);
  const MinkowskiVerdict v = minkowski_sides(a, ExponentPair(1.0, 1.0));
  CHECK(std::abs(v.lhs - a.hermitian().trace()) <= 1e-12 * v.lhs);
  CHECK(std::abs(v.rhs - a.hermitian().trace()) <= 1e-12 * v.rhs);
}

TEST_CASE("minkowski on diagonal inputs matches the scalar oracle") {
  Rng rng = seeded(512);
  for (auto [p, q] : {std::pair{2.0, 1.0}, {1.5, 1.25}, {0.5, 1.0}, {0.25, 0.25}, {3.0, 1.0}}) {
    for (const auto& dims : {std::array<Index, 3>{2, 2, 2}, std::array<Index, 3>{2, 3, 2}}) {
      const Diagonal3 d = random_diagonal(rng, dims[0], dims[1], dims[2], false);
      const MinkowskiVerdict v = minkowski_sides(d.matrix(), ExponentPair(p, q));
      const auto [lhs, rhs] = scalar_minkowski(d, p, q);
      CHECK(std::abs(v.lhs - lhs) <= 1e-10 * std::abs(lhs));
      CHECK(std::abs(v.rhs - rhs) <= 1e-10 * std::abs(rhs));
    }
  }
}

TEST_CASE("property: minkowski holds in both regimes") {
  Rng rng = seeded(513);
  for (double p : {1.0, 1.25, 1.5, 1.75, 2.0}) {
    for (double q = 1.0; q <= p + 1e-12; q += 0.25) {
      for (int rep = 0; rep < 40; ++rep) {
        const MinkowskiVerdict v = minkowski_sides(random_tripartite(rng), ExponentPair(p, q));
        CHECK(v.direction == Direction::kLE);
        CHECK(v.margin >= -1e-9 * v.scale());
        CHECK(v.holds());
      }
    }
  }
  for (double p : {0.25, 0.5, 0.75, 1.0}) {
    for (double q : {p, 1.0}) {
      for (int rep = 0; rep < 40; ++rep) {
        const MinkowskiVerdict v = minkowski_sides(random_tripartite(rng), ExponentPair(p, q));
        CHECK(v.margin >= -1e-9 * v.scale());
        if (p < 1.0) CHECK(v.direction == Direction::kGE);
      }
    }
  }
}

TEST_CASE("minkowski at p = q is an equality") {
  Rng rng = seeded(514);
  for (double p : {0.5, 1.0, 1.5, 2.0}) {
    const MinkowskiVerdict v = minkowski_sides(random_tripartite(rng), ExponentPair(p, p));
    CHECK(std::abs(v.lhs - v.rhs) <= 1e-10 * v.scale());
  }
}

TEST_CASE("minkowski two-space form") {
  Rng rng = seeded(515);
  const LabeledMatrix a(TensorSpace({2, 3}), wishart(rng, 6).hermitian());
  const MinkowskiVerdict eq = minkowski_two_space(a, ExponentPair(1.5, 1.5));
  CHECK(std::abs(eq.lhs - eq.rhs) <= 1e-10 * eq.scale());

  const LabeledMatrix pq = kron(wishart(rng, 2).hermitian(), wishart(rng, 2).hermitian());
  CHECK(minkowski_two_space(pq, ExponentPair(2.0, 1.0)).margin >= -1e-9);

  const LabeledMatrix lifted(TensorSpace({2, 3, 1}), a.hermitian());
  const MinkowskiVerdict two = minkowski_two_space(a, ExponentPair(2.0, 1.0));
  const MinkowskiVerdict three = minkowski_sides(lifted, ExponentPair(2.0, 1.0));
  CHECK(two.lhs == three.lhs);
  CHECK(two.rhs == three.rhs);

  CHECK(code_of([&] { minkowski_two_space(lifted, ExponentPair(1, 1)); }) ==
        ErrorCode::kNotBipartite);
  CHECK(code_of([&] { minkowski_sides(a, ExponentPair(1, 1)); }) == ErrorCode::kNotTripartite);
}

TEST_CASE("entropy examples") {
  Rng rng = seeded(521);
  const Eigen::VectorXcd v = random_unit_vector(rng, 4);
  CHECK(std::abs(entropy(PsdMatrix(Matrix(v * v.adjoint())))) < 1e-14);
  CHECK(entropy(PsdMatrix::identity(5) * 0.2) == doctest::Approx(std::log(5.0)).epsilon(1e-14));
  CHECK(entropy(psd_diag({0.25, 0.75})) == doctest::Approx(0.5623351446188083).epsilon(1e-13));
  CHECK(code_of([] { entropy(psd_diag({0.5, 0.6})); }) == ErrorCode::kNotADensityMatrix);
  for (int rep = 0; rep < 20; ++rep) {
    const double s = entropy(random_density_matrix(rng, 6));
    CHECK(s >= -1e-10);
    CHECK(s <= std::log(6.0) + 1e-10);
  }
}

TEST_CASE("ssa gap examples") {
  Rng rng = seeded(531);
  const PsdMatrix r1 = random_density_matrix(rng, 2);
  const PsdMatrix r2 = random_density_matrix(rng, 3);
  const PsdMatrix r3 = random_density_matrix(rng, 2);
  const LabeledMatrix product(TensorSpace({2, 3, 2}),
                              HermitianMatrix::symmetrized(kron(kron(r1.matrix(), r2.matrix()), r3.matrix())));
  CHECK(std::abs(ssa_gap(DensityMatrix(product))) <= 1e-10);

  for (int rep = 0; rep < 100; ++rep) {
    CHECK(ssa_gap(random_state(rng)) >= -1e-9);
    CHECK(ssa_gap(random_state(rng, TensorSpace({2, 3, 2}))) >= -1e-9);
  }

  for (int rep = 0; rep < 20; ++rep) {
    const Diagonal3 d = random_diagonal(rng, 2, 3, 2, true);
    const double gap = ssa_gap(DensityMatrix(d.matrix()));
    CHECK(std::abs(gap - classical_cmi(d)) <= 1e-9);
  }

  const LabeledMatrix bip(TensorSpace({2, 2}), HermitianMatrix::identity(4) * 0.25);
  CHECK(code_of([&] { ssa_gap(DensityMatrix(bip)); }) == ErrorCode::kNotTripartite);
}

TEST_CASE("property: pure tripartite states") {
  Rng rng = seeded(532);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::VectorXcd v = random_unit_vector(rng, 8);
    const DensityMatrix rho(LabeledMatrix(kTri, HermitianMatrix::symmetrized(v * v.adjoint())));
    CHECK(std::abs(entropy(rho.psd())) < 1e-9);
    CHECK(ssa_gap(rho) >= -1e-9);
    // For a pure state S(13) = S(2) and S(23) = S(1).
    const double s2 = entropy(partial_trace(rho.labeled(), std::vector<int>{1, 3}).psd());
    const double s13 = entropy(partial_trace(rho.labeled(), 2).psd());
    CHECK(std::abs(s2 - s13) < 1e-9);
  }
}

TEST_CASE("entropy bridge limits") {
  Rng rng = seeded(541);
  // Maximally mixed: slopes are ln(d1 d3) - ln(d) = -ln d2 and ln d3 - ln(d2 d3).
  const TensorSpace s({2, 3, 2});
  const DensityMatrix mixed(LabeledMatrix(s, HermitianMatrix::identity(12) * (1.0 / 12.0)));
  const SsaBridge m = ssa_from_minkowski(mixed, 0.01);
  CHECK(m.limit1 == doctest::Approx(-std::log(3.0)).epsilon(1e-12));
  CHECK(m.limit2 == doctest::Approx(-std::log(3.0)).epsilon(1e-12));

  // Product state: S(13) - S(123) = -S(2).
  const PsdMatrix r1 = random_density_matrix(rng, 2);
  const PsdMatrix r2 = random_density_matrix(rng, 2);
  const PsdMatrix r3 = random_density_matrix(rng, 2);
  const DensityMatrix product(LabeledMatrix(
      kTri, HermitianMatrix::symmetrized(kron(kron(r1.matrix(), r2.matrix()), r3.matrix()))));
  const SsaBridge pb = ssa_from_minkowski(product, 0.005);
  CHECK(pb.limit1 == doctest::Approx(-entropy(r2)).epsilon(1e-10));
  CHECK(std::abs(pb.slope1 - pb.limit1) < 0.05);

  CHECK(code_of([&] { ssa_from_minkowski(mixed, 0.0); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { ssa_from_minkowski(mixed, 0.2); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("property: entropy bridge errors halve with eps") {
  Rng rng = seeded(542);
  for (int rep = 0; rep < 10; ++rep) {
    const DensityMatrix rho = random_state(rng);
    double e1_prev = 0.0, e2_prev = 0.0, e3_prev = 0.0;
    for (double eps : {0.02, 0.01, 0.005}) {
      const SsaBridge b = ssa_from_minkowski(rho, eps);
      const double e1 = std::abs(b.slope1 - b.limit1);
      const double e2 = std::abs(b.slope2 - b.limit2);
      const double e3 = std::abs(b.margin_slope - b.ssa_gap);
      CHECK(b.f2 <= b.f1 + 1e-12);  // q = 1 Minkowski at p = 1 + eps
      if (eps < 0.02) {
        CHECK(e1_prev / e1 >= 1.5);
        CHECK(e1_prev / e1 <= 2.5);
        CHECK(e2_prev / e2 >= 1.5);
        CHECK(e2_prev / e2 <= 2.5);
        CHECK(e3 < e3_prev);
      }
      e1_prev = e1;
      e2_prev = e2;
      e3_prev = e3;
    }
  }
}
