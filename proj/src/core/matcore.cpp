#include "core/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace tracecvx {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kSchema: return "SchemaViolation";
    case ErrorCode::kNonHermitianInput: return "NonHermitianInput";
    case ErrorCode::kNotPsd: return "NotPsd";
    case ErrorCode::kSingularPower: return "SingularPower";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kBadFactorIndex: return "BadFactorIndex";
    case ErrorCode::kNotBipartite: return "NotBipartite";
    case ErrorCode::kNotTripartite: return "NotTripartite";
    case ErrorCode::kNotADensityMatrix: return "NotADensityMatrix";
    case ErrorCode::kBadRegime: return "BadRegime";
    case ErrorCode::kGroupTooLarge: return "GroupTooLarge";
    case ErrorCode::kSearchExhausted: return "SearchExhausted";
    case ErrorCode::kNotAContraction: return "NotAContraction";
    case ErrorCode::kSingularCore: return "SingularCore";
    case ErrorCode::kSingularProbe: return "SingularProbe";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// HermitianMatrix

HermitianMatrix::HermitianMatrix(const Matrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) {
    fail(ErrorCode::kDimMismatch, "matrix is not square");
  }
  if (m.rows() == 0) {
    fail(ErrorCode::kInvalidArgument, "matrix dimension must be positive");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (!std::isfinite(scale) || asym > tol.herm * scale) {
    std::ostringstream os;
    os << "matrix is not Hermitian: max |A - A*| = " << asym
       << " exceeds " << tol.herm << " * " << scale;
    fail(ErrorCode::kNonHermitianInput, os.str());
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::symmetrized(const Matrix& m) {
  HermitianMatrix h;
  h.m_ = 0.5 * (m + m.adjoint());
  return h;
}

HermitianMatrix HermitianMatrix::identity(Index n) {
  HermitianMatrix h;
  h.m_ = Matrix::Identity(n, n);
  return h;
}

HermitianMatrix HermitianMatrix::zero(Index n) {
  HermitianMatrix h;
  h.m_ = Matrix::Zero(n, n);
  return h;
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& d) {
  HermitianMatrix h;
  h.m_ = d.cast<Complex>().asDiagonal();
  return h;
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  if (o.dim() != dim()) fail(ErrorCode::kDimMismatch, "dimension mismatch in +");
  HermitianMatrix h;
  h.m_ = m_ + o.m_;
  return h;
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  if (o.dim() != dim()) fail(ErrorCode::kDimMismatch, "dimension mismatch in -");
  HermitianMatrix h;
  h.m_ = m_ - o.m_;
  return h;
}

HermitianMatrix HermitianMatrix::operator*(double t) const {
  HermitianMatrix h;
  h.m_ = m_ * t;
  return h;
}

// ---------------------------------------------------------------------------
// Spectral decomposition

Matrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() *
         eigenvectors.adjoint();
}

SpectralDecomposition eigh(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::kInvalidArgument, "eigendecomposition did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

SpectralDecomposition eigh(const Matrix& a, const Tolerances& tol) {
  return eigh(HermitianMatrix(a, tol));
}

// ---------------------------------------------------------------------------
// PsdMatrix

PsdMatrix::PsdMatrix(const HermitianMatrix& h, const Tolerances& tol)
    : h_(h), sd_(eigh(h)) {
  const RealVector& ev = sd_.eigenvalues;
  eigen_floor_ = ev.minCoeff();
  const double lmax = ev.cwiseAbs().maxCoeff();
  if (eigen_floor_ < -tol.psd * lmax) {
    std::ostringstream os;
    os << "matrix is not positive semidefinite: eigenvalue " << eigen_floor_
       << " below -" << tol.psd << " * " << lmax;
    fail(ErrorCode::kNotPsd, os.str());
  }
  if (eigen_floor_ < 0.0) {
    sd_.eigenvalues = ev.cwiseMax(0.0);
    h_ = HermitianMatrix::symmetrized(sd_.reconstruct());
  }
}

PsdMatrix::PsdMatrix(const Matrix& m, const Tolerances& tol)
    : PsdMatrix(HermitianMatrix(m, tol), tol) {}

PsdMatrix PsdMatrix::from_spectrum(SpectralDecomposition sd) {
  const Index n = sd.eigenvalues.size();
  bool sorted = true;
  for (Index i = 1; i < n; ++i) {
    if (sd.eigenvalues(i) < sd.eigenvalues(i - 1)) {
      sorted = false;
      break;
    }
  }
  if (!sorted) {
    std::vector<Index> order(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
      return sd.eigenvalues(x) < sd.eigenvalues(y);
    });
    SpectralDecomposition s2{RealVector(n), Matrix(n, n)};
    for (Index i = 0; i < n; ++i) {
      s2.eigenvalues(i) = sd.eigenvalues(order[static_cast<size_t>(i)]);
      s2.eigenvectors.col(i) = sd.eigenvectors.col(order[static_cast<size_t>(i)]);
    }
    sd = std::move(s2);
  }
  PsdMatrix out;
  out.h_ = HermitianMatrix::symmetrized(sd.reconstruct());
  out.eigen_floor_ = n > 0 ? sd.eigenvalues(0) : 0.0;
  out.sd_ = std::move(sd);
  return out;
}

PsdMatrix PsdMatrix::identity(Index n) {
  return from_spectrum({RealVector::Ones(n), Matrix::Identity(n, n)});
}

PsdMatrix PsdMatrix::zero(Index n) {
  return from_spectrum({RealVector::Zero(n), Matrix::Identity(n, n)});
}

double PsdMatrix::max_eigenvalue() const {
  return sd_.eigenvalues.size() ? sd_.eigenvalues.maxCoeff() : 0.0;
}

PsdMatrix PsdMatrix::operator+(const PsdMatrix& o) const {
  if (o.dim() != dim()) fail(ErrorCode::kDimMismatch, "dimension mismatch in +");
  return clamp_to_psd(matrix() + o.matrix());
}

PsdMatrix PsdMatrix::operator*(double t) const {
  if (t < 0.0) fail(ErrorCode::kInvalidArgument, "negative scaling of a PSD matrix");
  SpectralDecomposition sd = sd_;
  sd.eigenvalues *= t;
  return from_spectrum(std::move(sd));
}

// ---------------------------------------------------------------------------
// Spectral functions

namespace {

RealVector powered_spectrum(const PsdMatrix& a, double s, const Tolerances& tol) {
  const RealVector& ev = a.eigenvalues();
  const double lmax = a.max_eigenvalue();
  const double cut = tol.sing * lmax;
  RealVector out(ev.size());
  if (s < 0.0) {
    if (ev.size() == 0 || !(ev.minCoeff() > cut) || lmax <= 0.0) {
      std::ostringstream os;
      os << "negative power " << s << " of a matrix with eigenvalue "
         << (ev.size() ? ev.minCoeff() : 0.0) << " at or below " << cut;
      fail(ErrorCode::kSingularPower, os.str());
    }
  }
  for (Index i = 0; i < ev.size(); ++i) {
    const double l = ev(i);
    if (s == 0.0) {
      out(i) = (l > cut && lmax > 0.0) ? 1.0 : 0.0;
    } else if (s == 1.0) {
      out(i) = l;
    } else {
      out(i) = l > 0.0 ? std::pow(l, s) : 0.0;
    }
  }
  return out;
}

}  // namespace

PsdMatrix matrix_power(const PsdMatrix& a, double s, const Tolerances& tol) {
  if (s == 1.0) return a;
  return PsdMatrix::from_spectrum(
      {powered_spectrum(a, s, tol), a.spectrum().eigenvectors});
}

double trace_power(const PsdMatrix& a, double s, const Tolerances& tol) {
  return powered_spectrum(a, s, tol).sum();
}

namespace {

double schatten_from_values(const RealVector& absvals, double q) {
  if (q == kInf) return absvals.size() ? absvals.maxCoeff() : 0.0;
  if (!(q > 0.0)) fail(ErrorCode::kInvalidArgument, "Schatten exponent must be positive");
  double sum = 0.0;
  for (Index i = 0; i < absvals.size(); ++i) {
    if (absvals(i) > 0.0) sum += std::pow(absvals(i), q);
  }
  return std::pow(sum, 1.0 / q);
}

}  // namespace

double schatten_norm(const HermitianMatrix& a, double q) {
  return schatten_from_values(eigh(a).eigenvalues.cwiseAbs(), q);
}

double schatten_norm(const PsdMatrix& a, double q) {
  return schatten_from_values(a.eigenvalues(), q);
}

double schatten_norm_general(const Matrix& a, double q) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return schatten_from_values(svd.singularValues(), q);
}

double operator_norm(const Matrix& a) { return schatten_norm_general(a, kInf); }

double trace_xlogx(const PsdMatrix& rho, const Tolerances& tol) {
  const RealVector& ev = rho.eigenvalues();
  const double cut = tol.sing * rho.max_eigenvalue();
  double sum = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cut && ev(i) > 0.0) sum += ev(i) * std::log(ev(i));
  }
  return sum;
}

PsdMatrix clamp_to_psd(const Matrix& m) {
  SpectralDecomposition sd = eigh(HermitianMatrix::symmetrized(m));
  sd.eigenvalues = sd.eigenvalues.cwiseMax(0.0);
  return PsdMatrix::from_spectrum(std::move(sd));
}

double relative_frobenius_error(const Matrix& actual, const Matrix& expected) {
  const double denom = std::max(expected.norm(), 1e-300);
  return (actual - expected).norm() / denom;
}

// ---------------------------------------------------------------------------
// ExponentPair

const char* regime_name(Regime r) noexcept {
  switch (r) {
    case Regime::kConvex: return "CONVEX";
    case Regime::kConcave: return "CONCAVE";
    case Regime::kNeither: return "NEITHER";
  }
  return "NEITHER";
}

ExponentPair::ExponentPair(double p, double q) : p_(p), q_(q) {
  if (!(p > 0.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q)) {
    fail(ErrorCode::kInvalidArgument, "exponents p and q must be finite and positive");
  }
}

Regime ExponentPair::regime() const {
  if (p_ >= 1.0 && p_ <= 2.0 && q_ >= 1.0) return Regime::kConvex;
  if (p_ <= q_ && q_ <= 1.0) return Regime::kConcave;
  return Regime::kNeither;
}

}  // namespace tracecvx
