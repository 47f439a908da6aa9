#include "core/norms.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "core/functionals.hpp"
#include "core/sampling.hpp"

namespace tracecvx {

namespace {

Matrix negative_part(const Matrix& m) {
  SpectralDecomposition sd = eigh(HermitianMatrix::symmetrized(m));
  sd.eigenvalues = (-sd.eigenvalues).cwiseMax(0.0);
  return sd.reconstruct();
}

RealVector odd_power(const RealVector& v, double s) {
  RealVector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = std::copysign(std::pow(std::abs(v(i)), s), v(i));
  return out;
}

void require_convex_regime(const ExponentPair& exps) {
  if (exps.regime() != Regime::kConvex) {
    std::ostringstream os;
    os << "the L^q(L^p) norm needs 1 <= p <= 2 and q >= 1, got p = " << exps.p()
       << ", q = " << exps.q();
    fail(ErrorCode::kBadRegime, os.str());
  }
}

// Feasible set {R : P + R >= 0, N + R >= 0} for the Jordan parts P, N of X.
class DescentProblem {
 public:
  DescentProblem(const Decomposition& jordan, const TensorSpace& space, const ExponentPair& exps,
                 const Tolerances& tol)
      : pos_(jordan.a.matrix()), neg_(jordan.b.matrix()), space_(space), exps_(exps),
        tol_(tol) {}

  double objective(const Matrix& r) const {
    return psi(clamp_to_psd(pos_ + r), space_, exps_, tol_) +
           psi(clamp_to_psd(neg_ + r), space_, exps_, tol_);
  }

  // The objective extended past the cone boundary by odd powers
  // sign(x)|x|^s. It agrees with objective() on feasible points and stays
  // differentiable across the boundary, so central differences taken at a
  // boundary point are not biased by clamping.
  double smooth_objective(const Matrix& r) const {
    return extended_psi(pos_ + r) + extended_psi(neg_ + r);
  }

  // Dykstra's alternating projections onto {P + R >= 0} and {N + R >= 0},
  // run in both orders and averaged so X and -X follow mirrored
  // trajectories, then lifted by both negative parts, which restores exact
  // feasibility.
  Matrix project(const Matrix& r, double scale) const {
    const Matrix avg = 0.5 * (dykstra(r, pos_, neg_, scale) + dykstra(r, neg_, pos_, scale));
    return avg + (negative_part(pos_ + avg) + negative_part(neg_ + avg));
  }

  // Central differences along an orthonormal basis of Hermitian matrices.
  Matrix gradient(const Matrix& r, double h) const {
    const Index n = r.rows();
    Matrix g = Matrix::Zero(n, n);
    auto diff = [&](auto&& perturb) {
      Matrix plus = r;
      Matrix minus = r;
      perturb(plus, h);
      perturb(minus, -h);
      return (smooth_objective(plus) - smooth_objective(minus)) / (2.0 * h);
    };
    const double s = 1.0 / std::sqrt(2.0);
    for (Index k = 0; k < n; ++k) {
      g(k, k) = diff([k](Matrix& m, double d) { m(k, k) += d; });
    }
    for (Index j = 0; j < n; ++j) {
      for (Index k = j + 1; k < n; ++k) {
        const double re = diff([=](Matrix& m, double d) {
          m(j, k) += s * d;
          m(k, j) += s * d;
        });
        const double im = diff([=](Matrix& m, double d) {
          m(j, k) += Complex(0.0, s * d);
          m(k, j) -= Complex(0.0, s * d);
        });
        g(j, k) = Complex(s * re, s * im);
        g(k, j) = std::conj(g(j, k));
      }
    }
    return g;
  }

  Decomposition decomposition(const Matrix& r) const {
    return {clamp_to_psd(pos_ + r), clamp_to_psd(neg_ + r)};
  }

 private:
  static Matrix dykstra(const Matrix& r0, const Matrix& first, const Matrix& second,
                        double scale) {
    const Index n = r0.rows();
    Matrix x = r0;
    Matrix c1 = Matrix::Zero(n, n);
    Matrix c2 = Matrix::Zero(n, n);
    for (int it = 0; it < 200; ++it) {
      const Matrix y = x + c1;
      const Matrix py = y + negative_part(first + y);
      c1 = y - py;
      const Matrix z = py + c2;
      const Matrix pz = z + negative_part(second + z);
      c2 = z - pz;
      const double moved = (pz - x).norm();
      x = pz;
      if (moved <= 1e-14 * scale) break;
    }
    return x;
  }

  double extended_psi(const Matrix& h) const {
    const SpectralDecomposition sd = eigh(HermitianMatrix::symmetrized(h));
    const Matrix powered = sd.eigenvectors *
                           odd_power(sd.eigenvalues, exps_.p()).asDiagonal() *
                           sd.eigenvectors.adjoint();
    const Matrix reduced = partial_trace(powered, space_, 2);
    const RealVector mu = eigh(HermitianMatrix::symmetrized(reduced)).eigenvalues;
    const double s = odd_power(mu, exps_.q() / exps_.p()).sum();
    return std::copysign(std::pow(std::abs(s), 1.0 / exps_.q()), s);
  }

  Matrix pos_;
  Matrix neg_;
  TensorSpace space_;
  ExponentPair exps_;
  Tolerances tol_;
};

}  // namespace

Decomposition jordan_decomposition(const HermitianMatrix& x) {
  const SpectralDecomposition sd = eigh(x);
  SpectralDecomposition pos = sd;
  SpectralDecomposition neg = sd;
  pos.eigenvalues = sd.eigenvalues.cwiseMax(0.0);
  neg.eigenvalues = (-sd.eigenvalues).cwiseMax(0.0);
  return {PsdMatrix::from_spectrum(std::move(pos)), PsdMatrix::from_spectrum(std::move(neg))};
}

NormResult lqlp_selfadjoint_norm(const LabeledMatrix& x, const ExponentPair& exps,
                                 const OptimizerBudget& budget,
                                 const std::optional<Decomposition>& start,
                                 const Tolerances& tol) {
  require_convex_regime(exps);
  if (x.space().num_factors() != 2) {
    fail(ErrorCode::kNotBipartite, "the L^q(L^p) norm needs a bipartite tensor space");
  }
  const Index n = x.dim();
  const Decomposition jordan = jordan_decomposition(x.hermitian());
  NormResult out;
  const double scale = x.matrix().norm();
  if (scale == 0.0) {
    out.decomposition = {PsdMatrix::zero(n), PsdMatrix::zero(n)};
    out.converged = true;
    out.history = {0.0};
    return out;
  }

  const DescentProblem problem(jordan, x.space(), exps, tol);
  Matrix r = Matrix::Zero(n, n);
  if (start) {
    if (start->a.dim() != n || start->b.dim() != n) {
      fail(ErrorCode::kDimMismatch, "starting decomposition has the wrong dimension");
    }
    if (relative_frobenius_error(start->target(), x.matrix()) > 1e-10) {
      fail(ErrorCode::kInvalidArgument, "starting decomposition does not reproduce X");
    }
    r = problem.project(start->a.matrix() - jordan.a.matrix(), scale);
  }

  const auto t0 = std::chrono::steady_clock::now();
  const double h = 1e-5 * scale;
  double f = problem.objective(r);
  out.start_value = f;
  out.history.push_back(f);
  double alpha = 0.1 * scale;

  for (int iter = 0; iter < budget.max_iters; ++iter) {
    if (budget.time_cap > 0.0) {
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      if (dt.count() > budget.time_cap) break;
    }
    const Matrix g = problem.gradient(r, h);
    bool accepted = false;
    Matrix next;
    double fnext = f;
    for (int k = 0; k < 60; ++k) {
      next = problem.project(r - alpha * g, scale);
      fnext = problem.objective(next);
      if (fnext < f) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      out.converged = true;
      break;
    }
    const double mapping = (next - r).norm() / alpha;
    r = std::move(next);
    f = fnext;
    out.history.push_back(f);
    ++out.iterations;
    if (mapping < budget.grad_tol) {
      out.converged = true;
      break;
    }
    alpha *= 2.0;
  }
  out.value = f;
  out.decomposition = problem.decomposition(r);
  return out;
}

const char* grouping_name(BlockGrouping g) noexcept {
  return g == BlockGrouping::kTracedSlot ? "H1(H2C2)" : "(C2H1)H2";
}

namespace {

TensorSpace grouped_space(const TensorSpace& space, BlockGrouping grouping) {
  const Index d1 = space.factor_dim(1);
  const Index d2 = space.factor_dim(2);
  return grouping == BlockGrouping::kTracedSlot ? TensorSpace({d1, 2 * d2})
                                                : TensorSpace({2 * d1, d2});
}

void require_bipartite(const TensorSpace& space, Index dim) {
  if (space.num_factors() != 2) {
    fail(ErrorCode::kNotBipartite, "block embedding needs a bipartite tensor space");
  }
  if (space.total_dim() != dim) {
    fail(ErrorCode::kDimMismatch, "operator dimension does not match its tensor space");
  }
}

}  // namespace

Matrix block_matrix(const Matrix& m00, const Matrix& m01, const Matrix& m10, const Matrix& m11,
                    const TensorSpace& space, BlockGrouping grouping) {
  const Index n = space.total_dim();
  Matrix natural(2 * n, 2 * n);
  natural << m00, m01, m10, m11;
  if (grouping == BlockGrouping::kFirstSlot) return natural;
  // Natural order is C^2 (x) H1 (x) H2; move the block index last.
  const TensorSpace three({2, space.factor_dim(1), space.factor_dim(2)});
  return permute_factors(natural, three, {2, 3, 1});
}

BlockEmbedding block_embed(const Matrix& a, const TensorSpace& space, BlockGrouping grouping) {
  require_bipartite(space, a.rows());
  if (a.rows() != a.cols()) fail(ErrorCode::kDimMismatch, "block embedding needs a square matrix");
  const Index n = a.rows();
  const Matrix z = Matrix::Zero(n, n);
  const Matrix m = block_matrix(z, a, a.adjoint(), z, space, grouping);
  return {a, grouping,
          LabeledMatrix(grouped_space(space, grouping), HermitianMatrix::symmetrized(m))};
}

Decomposition induced_block_decomposition(const Decomposition& d, const TensorSpace& space,
                                          BlockGrouping grouping) {
  require_bipartite(space, d.a.dim());
  const Matrix& p = d.a.matrix();
  const Matrix& q = d.b.matrix();
  const Matrix sum = 0.5 * (p + q);
  const Matrix diff = 0.5 * (p - q);
  return {clamp_to_psd(block_matrix(sum, diff, diff, sum, space, grouping)),
          clamp_to_psd(block_matrix(sum, -diff, -diff, sum, space, grouping))};
}

GeneralNormResult lqlp_general_norm(const Matrix& a, const TensorSpace& space,
                                    const ExponentPair& exps, BlockGrouping grouping,
                                    const OptimizerBudget& budget,
                                    const std::optional<Decomposition>& start,
                                    const Tolerances& tol) {
  require_convex_regime(exps);
  const BlockEmbedding emb = block_embed(a, space, grouping);
  GeneralNormResult out;
  out.grouping = grouping;
  out.embedded = lqlp_selfadjoint_norm(emb.embedded, exps, budget, start, tol);
  out.value = 0.5 * out.embedded.value;
  return out;
}

UnitaryMixCheck unitary_mix_identity_check(const PsdMatrix& b, const PsdMatrix& c,
                                           const TensorSpace& space, const ExponentPair& exps,
                                           const Tolerances& tol) {
  require_bipartite(space, b.dim());
  require_bipartite(space, c.dim());
  const Index n = b.dim();
  const Matrix& bm = b.matrix();
  const Matrix& cm = c.matrix();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix z = Matrix::Zero(n, n);
  Matrix u(2 * n, 2 * n);
  u << id, id, id, -id;
  u /= std::sqrt(2.0);

  auto natural = [](const Matrix& m00, const Matrix& m01, const Matrix& m10, const Matrix& m11) {
    const Index k = m00.rows();
    Matrix m(2 * k, 2 * k);
    m << m00, m01, m10, m11;
    return m;
  };
  const Matrix mix1 = natural(bm + cm, bm - cm, bm - cm, bm + cm);
  const Matrix mix2 = natural(bm + cm, cm - bm, cm - bm, bm + cm);
  const Matrix diag_bc = natural(bm, z, z, cm);
  const Matrix diag_cb = natural(cm, z, z, bm);
  const double scale = std::max({bm.norm(), cm.norm(), 1e-300});

  UnitaryMixCheck out;
  auto note = [&](double dev) { out.max_deviation = std::max(out.max_deviation, dev); };
  note((u * mix1 * u.adjoint() - 2.0 * diag_bc).cwiseAbs().maxCoeff() / scale);
  note((u * mix2 * u.adjoint() - 2.0 * diag_cb).cwiseAbs().maxCoeff() / scale);
  note((u * natural(bm - cm, z, z, cm - bm) * u.adjoint() - natural(z, bm - cm, bm - cm, z))
           .cwiseAbs()
           .maxCoeff() /
       scale);

  const TensorSpace three({2, space.factor_dim(1), space.factor_dim(2)});
  for (BlockGrouping g : {BlockGrouping::kTracedSlot, BlockGrouping::kFirstSlot}) {
    const TensorSpace gs = grouped_space(space, g);
    auto regroup = [&](const Matrix& m) {
      return g == BlockGrouping::kFirstSlot ? m : permute_factors(m, three, {2, 3, 1});
    };
    auto psi_of = [&](const Matrix& m) { return psi(clamp_to_psd(regroup(m)), gs, exps, tol); };
    const double target1 = 2.0 * psi_of(diag_bc);
    const double target2 = 2.0 * psi_of(diag_cb);
    const double denom = std::max({std::abs(target1), std::abs(target2), 1e-300});
    note(std::abs(psi_of(mix1) - target1) / denom);
    note(std::abs(psi_of(mix2) - target2) / denom);
    if (g == BlockGrouping::kTracedSlot) {
      out.psi_block_traced = 0.5 * target1;
    } else {
      out.psi_block_first = 0.5 * target1;
    }
  }
  out.psi_b = psi(b, space, exps, tol);
  out.psi_c = psi(c, space, exps, tol);
  return out;
}

namespace {

// Frechet derivative of A -> psi(A) as a Hermitian matrix (Daleckii-Krein).
// Requires the reduced operator Tr_2 A^p to be invertible when q < p.
Matrix psi_gradient(const PsdMatrix& a, const TensorSpace& space, const ExponentPair& exps,
                    const Tolerances& tol) {
  const double p = exps.p();
  const double q = exps.q();
  const PsdMatrix m = clamp_to_psd(partial_trace(matrix_power(a, p, tol).matrix(), space, 2));
  const double tr = trace_power(m, q / p, tol);
  const Matrix weight = std::pow(tr, 1.0 / q - 1.0) / p * matrix_power(m, q / p - 1.0, tol).matrix();
  const Matrix c = kron(weight, Matrix::Identity(space.factor_dim(2), space.factor_dim(2)));
  const SpectralDecomposition& sd = a.spectrum();
  const RealVector& lam = sd.eigenvalues;
  const Index n = lam.size();
  Matrix inner = sd.eigenvectors.adjoint() * c * sd.eigenvectors;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double li = lam(i);
      const double lj = lam(j);
      double dd;
      if (std::abs(li - lj) <= 1e-12 * std::max(std::abs(li), std::abs(lj))) {
        dd = p * std::pow(std::max(li, 0.0), p - 1.0);
      } else {
        dd = (std::pow(li, p) - std::pow(lj, p)) / (li - lj);
      }
      inner(i, j) *= dd;
    }
  }
  return sd.eigenvectors * inner * sd.eigenvectors.adjoint();
}

}  // namespace

std::optional<MonotonicityWitness> find_psi_nonmonotonicity(const TensorSpace& space,
                                                            const ExponentPair& exps,
                                                            std::uint64_t seed, int attempts,
                                                            const Tolerances& tol) {
  if (space.num_factors() != 2) {
    fail(ErrorCode::kNotBipartite, "psi needs a bipartite tensor space");
  }
  const Index n = space.total_dim();
  for (int k = 0; k < attempts; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    const PsdMatrix a = wishart(rng, n);
    const Matrix grad = psi_gradient(a, space, exps, tol);
    const SpectralDecomposition gs = eigh(HermitianMatrix::symmetrized(grad));
    if (!(gs.eigenvalues(0) < 0.0)) continue;
    const Eigen::VectorXcd v = gs.eigenvectors.col(0);
    const double psi_a = psi(a, space, exps, tol);
    double s = 0.1 * a.max_eigenvalue();
    for (int j = 0; j < 8; ++j, s *= 0.1) {
      const PsdMatrix a_prime = clamp_to_psd(a.matrix() + s * (v * v.adjoint()));
      const double psi_ap = psi(a_prime, space, exps, tol);
      if (psi_ap < psi_a * (1.0 - 1e-9)) {
        return MonotonicityWitness{a, a_prime, psi_a, psi_ap, k + 1};
      }
    }
  }
  return std::nullopt;
}

}  // namespace tracecvx
