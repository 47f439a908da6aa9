#include "core/functionals.hpp"

#include <cmath>
#include <sstream>

#include "core/sampling.hpp"

namespace tracecvx {

namespace {

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension " << a << " vs " << b;
    fail(ErrorCode::kDimMismatch, os.str());
  }
}

// || M^{1/p} ||_q for PSD M.
double root_norm(const Matrix& m, double p, double q, const Tolerances& tol) {
  const PsdMatrix s(HermitianMatrix::symmetrized(m), tol);
  return std::pow(trace_power(s, q / p, tol), 1.0 / q);
}

}  // namespace

double phi(std::span<const PsdMatrix> matrices, const ExponentPair& exps,
           const Tolerances& tol) {
  if (matrices.empty()) fail(ErrorCode::kInvalidArgument, "phi needs at least one matrix");
  const Index n = matrices.front().dim();
  Matrix sum = Matrix::Zero(n, n);
  for (const PsdMatrix& a : matrices) {
    require_same_dim(a.dim(), n, "phi arguments");
    sum += matrix_power(a, exps.p(), tol).matrix();
  }
  return root_norm(sum, exps.p(), exps.q(), tol);
}

double psi(const PsdMatrix& a, const TensorSpace& space, const ExponentPair& exps,
           const Tolerances& tol) {
  if (space.num_factors() != 2) {
    fail(ErrorCode::kNotBipartite, "psi needs a bipartite tensor space");
  }
  require_same_dim(a.dim(), space.total_dim(), "psi operand vs space");
  const Matrix reduced = partial_trace(matrix_power(a, exps.p(), tol).matrix(), space, 2);
  return root_norm(reduced, exps.p(), exps.q(), tol);
}

double psi(const LabeledMatrix& a, const ExponentPair& exps, const Tolerances& tol) {
  if (a.space().num_factors() != 2) {
    fail(ErrorCode::kNotBipartite, "psi needs a bipartite tensor space");
  }
  return psi(a.psd(tol), a.space(), exps, tol);
}

double upsilon(const PsdMatrix& a, const Matrix& b, const ExponentPair& exps,
               const Tolerances& tol) {
  require_same_dim(a.dim(), b.rows(), "upsilon A vs B");
  require_same_dim(b.rows(), b.cols(), "upsilon B");
  const Matrix core = b.adjoint() * matrix_power(a, exps.p(), tol).matrix() * b;
  const PsdMatrix m(HermitianMatrix::symmetrized(core), tol);
  return trace_power(m, exps.q() / exps.p(), tol);
}

double upsilon_altform(const PsdMatrix& a, const Matrix& b, const ExponentPair& exps,
                       const Tolerances& tol) {
  require_same_dim(a.dim(), b.rows(), "upsilon A vs B");
  require_same_dim(b.rows(), b.cols(), "upsilon B");
  const Matrix half = matrix_power(a, exps.p() / 2.0, tol).matrix();
  const Matrix core = half * b * b.adjoint() * half;
  const PsdMatrix m(HermitianMatrix::symmetrized(core), tol);
  return trace_power(m, exps.q() / exps.p(), tol);
}

// ---------------------------------------------------------------------------
// Variational representation

double variational_objective(const VariationalProbe& probe, const Tolerances& tol) {
  require_same_dim(probe.a.dim(), probe.b.rows(), "probe A vs B");
  require_same_dim(probe.a.dim(), probe.x.dim(), "probe A vs X");
  const double r = probe.exps.r();
  const double p = probe.exps.p();
  if (r > 1.0) {
    const double floor = probe.x.eigenvalues().minCoeff();
    if (!(floor > tol.sing * probe.x.max_eigenvalue()) || floor <= 0.0) {
      fail(ErrorCode::kSingularProbe, "probe X must be strictly positive when r > 1");
    }
  }
  const Matrix half = matrix_power(probe.a, p / 2.0, tol).matrix();
  const Matrix xpow = matrix_power(probe.x, 1.0 - r, tol).matrix();
  const Matrix core = half * probe.b * xpow * probe.b.adjoint() * half;
  return (core.trace().real() + (r - 1.0) * probe.x.trace()) / r;
}

VariationalMinimizer variational_minimizer(const PsdMatrix& a, const Matrix& b,
                                           const ExponentPair& exps, bool regularize,
                                           const Tolerances& tol) {
  require_same_dim(a.dim(), b.rows(), "minimizer A vs B");
  const double r = exps.r();
  if (r == 1.0) {
    fail(ErrorCode::kInvalidArgument, "the variational formula needs r = p/q != 1");
  }
  auto core_of = [&](const PsdMatrix& aa) {
    const Matrix c = b.adjoint() * matrix_power(aa, exps.p(), tol).matrix() * b;
    return PsdMatrix(HermitianMatrix::symmetrized(c), tol);
  };
  auto singular = [&](const PsdMatrix& m) {
    return !(m.eigenvalues().minCoeff() > tol.sing * m.max_eigenvalue()) ||
           m.max_eigenvalue() <= 0.0;
  };

  VariationalMinimizer out;
  PsdMatrix core = core_of(a);
  if (singular(core)) {
    if (!regularize) {
      fail(ErrorCode::kSingularCore, "B* A^p B is singular; request regularization");
    }
    out.shift = 1e-10 * std::max(a.max_eigenvalue(), 1e-300);
    const PsdMatrix shifted = clamp_to_psd(
        a.matrix() + out.shift * Matrix::Identity(a.dim(), a.dim()));
    // The shifted core is strictly positive exactly when B is invertible. Its
    // smallest eigenvalue scales like shift^p, which is far below tol.sing
    // for p > 1, so the relative test above does not apply here.
    const RealVector sv = Eigen::JacobiSVD<Matrix>(b).singularValues();
    if (!(sv(sv.size() - 1) > tol.sing * sv(0))) {
      fail(ErrorCode::kSingularCore, "B* A^p B stays singular after shifting A (B singular)");
    }
    core = core_of(shifted);
  }
  out.x = matrix_power(core, 1.0 / r, tol);
  return out;
}

VariationalCertificate certify_variational_minimizer(const PsdMatrix& a, const Matrix& b,
                                                     const ExponentPair& exps, int probes,
                                                     std::uint64_t seed,
                                                     const Tolerances& tol) {
  VariationalCertificate cert;
  const double r = exps.r();
  const VariationalMinimizer opt = variational_minimizer(a, b, exps, false, tol);
  cert.upsilon = upsilon(a, b, exps, tol);
  cert.objective_at_minimizer = variational_objective({a, b, exps, opt.x}, tol);
  cert.best_probe_advantage = -kInf;
  cert.probes = probes;

  Rng rng(seed);
  const Index n = a.dim();
  const double tr = opt.x.trace();
  const double lambda_min = opt.x.eigenvalues().minCoeff();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < probes; ++k) {
    PsdMatrix x;
    if (k % 2 == 0) {
      // Local perturbation of the optimizer, kept below half its smallest
      // eigenvalue so the probe stays strictly positive.
      const HermitianMatrix h = random_hermitian(rng, n);
      const double size =
          std::pow(10.0, -3.0 * unit(rng)) * 0.5 * lambda_min / operator_norm(h.matrix());
      x = clamp_to_psd(opt.x.matrix() + h.matrix() * size);
    } else {
      const PsdMatrix w = wishart(rng, n, 1e-6);
      x = w * (tr / w.trace());
    }
    const double value = variational_objective({a, b, exps, x}, tol);
    const double advantage =
        r > 1.0 ? cert.objective_at_minimizer - value : value - cert.objective_at_minimizer;
    cert.best_probe_advantage = std::max(cert.best_probe_advantage, advantage);
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Bilinear trace form

double joint_trace_form(const PsdMatrix& a, const PsdMatrix& b, const Matrix& k, double s,
                        double t, const Tolerances& tol) {
  require_same_dim(a.dim(), b.dim(), "trace form A vs B");
  require_same_dim(a.dim(), k.rows(), "trace form A vs K");
  const Matrix as = matrix_power(a, s, tol).matrix();
  const Matrix bt = matrix_power(b, t, tol).matrix();
  return (as * k.adjoint() * bt * k).trace().real();
}

Eigen::VectorXcd vectorize(const Matrix& k) {
  const Index n = k.rows();
  Eigen::VectorXcd v(n * k.cols());
  for (Index i = 0; i < k.cols(); ++i) {
    for (Index j = 0; j < n; ++j) v(i * n + j) = std::conj(k(j, i));
  }
  return v;
}

double joint_trace_form_vectorized(const PsdMatrix& a, const PsdMatrix& b, const Matrix& k,
                                   double s, double t, const Tolerances& tol) {
  require_same_dim(a.dim(), b.dim(), "trace form A vs B");
  const Matrix as = matrix_power(a, s, tol).matrix();
  const Matrix bt = matrix_power(b, t, tol).matrix().conjugate();
  const Eigen::VectorXcd v = vectorize(k);
  return v.dot(kron(as, bt) * v).real();
}

// ---------------------------------------------------------------------------
// Dilation

Dilation dilate_contraction(const Matrix& k, const Tolerances& tol) {
  require_same_dim(k.rows(), k.cols(), "contraction");
  const Index n = k.rows();
  const double norm = operator_norm(k);
  if (norm > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "operator norm " << norm << " exceeds 1";
    fail(ErrorCode::kNotAContraction, os.str());
  }

  const SpectralDecomposition sd = eigh(HermitianMatrix::symmetrized(k.adjoint() * k));
  const RealVector sigma2 = sd.eigenvalues.cwiseMax(0.0);
  const Matrix& v = sd.eigenvectors;

  // Images u_i = K v_i / sigma_i on the support; the rest is completed below.
  Matrix u = Matrix::Zero(n, n);
  std::vector<Index> missing;
  std::vector<Index> present;
  for (Index i = 0; i < n; ++i) {
    if (sigma2(i) > tol.sing) {
      u.col(i) = k * v.col(i) / std::sqrt(sigma2(i));
      present.push_back(i);
    } else {
      missing.push_back(i);
    }
  }
  size_t next = 0;
  for (Index e = 0; e < n && next < missing.size(); ++e) {
    Eigen::VectorXcd r = Eigen::VectorXcd::Unit(n, e);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i : present) r -= u.col(i) * u.col(i).dot(r);
    }
    const double rn = r.norm();
    if (rn > 1e-6) {
      const Index slot = missing[next++];
      u.col(slot) = r / rn;
      present.push_back(slot);
    }
  }

  Dilation d;
  d.polar_unitary = u * v.adjoint();
  RealVector defect(n);
  for (Index i = 0; i < n; ++i) defect(i) = std::sqrt(std::max(0.0, 1.0 - sigma2(i)));
  d.defect = d.polar_unitary * v * defect.cast<Complex>().asDiagonal() * v.adjoint();
  d.unitary.resize(2 * n, 2 * n);
  d.unitary << k, d.defect, -d.defect, k;
  return d;
}

TraceIdentity dilation_trace_identity(const PsdMatrix& a, const PsdMatrix& b, const Matrix& k,
                                      double s, double t, const Tolerances& tol) {
  require_same_dim(a.dim(), b.dim(), "dilation A vs B");
  require_same_dim(a.dim(), k.rows(), "dilation A vs K");
  const Index n = a.dim();
  const Matrix as = matrix_power(a, s, tol).matrix();
  const Matrix bt = matrix_power(b, t, tol).matrix();

  TraceIdentity out;
  out.original = (as * k * bt * k.adjoint()).trace().real();

  const Dilation d = dilate_contraction(k, tol);
  Matrix big_as = Matrix::Zero(2 * n, 2 * n);
  Matrix big_bt = Matrix::Zero(2 * n, 2 * n);
  big_as.topLeftCorner(n, n) = as;
  big_bt.topLeftCorner(n, n) = bt;
  out.dilated = (big_as * d.unitary * big_bt * d.unitary.adjoint()).trace().real();
  return out;
}

// ---------------------------------------------------------------------------
// Skew information

SkewInformation skew_information(const PsdMatrix& rho, const HermitianMatrix& k,
                                 const Tolerances& tol) {
  require_same_dim(rho.dim(), k.dim(), "skew information rho vs K");
  if (std::abs(rho.trace() - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "density matrix must have unit trace, got " << rho.trace();
    fail(ErrorCode::kNotADensityMatrix, os.str());
  }
  const Matrix root = matrix_power(rho, 0.5, tol).matrix();
  const Matrix& km = k.matrix();
  SkewInformation out;
  out.difference_form =
      (km * km * rho.matrix()).trace().real() - (root * km * root * km).trace().real();
  const Matrix comm = root * km - km * root;
  out.commutator_form = -(comm * comm).trace().real();
  out.ratio = out.commutator_form / out.difference_form;
  return out;
}

}  // namespace tracecvx
