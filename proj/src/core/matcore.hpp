#pragma once

// Dense complex Hermitian matrices, spectral functions and Schatten norms.

#include <complex>
#include <limits>

#include <Eigen/Dense>

#include "core/errors.hpp"

namespace tracecvx {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerance record threaded through every call chain.
///
/// `herm` is relative to the largest absolute entry, `psd` and `sing` are
/// relative to the largest eigenvalue magnitude.
struct Tolerances {
  double herm = 1e-12;
  double psd = 1e-10;
  double sing = 1e-12;

  Tolerances scaled(double factor) const {
    return {herm * factor, psd * factor, sing * factor};
  }
};

class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  /// Validates A = A* within `tol.herm` and stores the exact Hermitian part.
  explicit HermitianMatrix(const Matrix& m, const Tolerances& tol = {});

  /// Hermitian part (M + M*)/2 without validation. For values that are
  /// Hermitian by construction up to round-off.
  static HermitianMatrix symmetrized(const Matrix& m);
  static HermitianMatrix identity(Index n);
  static HermitianMatrix zero(Index n);
  static HermitianMatrix diagonal(const RealVector& d);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double t) const;

 private:
  Matrix m_;
};

struct SpectralDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // unitary, columns

  Matrix reconstruct() const;
};

/// Hermitian matrix with nonnegative spectrum. The spectral decomposition is
/// computed once at construction; eigenvalues in [-tol.psd * |lambda|_max, 0)
/// are clamped to zero, anything more negative is rejected with kNotPsd.
class PsdMatrix {
 public:
  PsdMatrix() = default;
  explicit PsdMatrix(const HermitianMatrix& h, const Tolerances& tol = {});
  explicit PsdMatrix(const Matrix& m, const Tolerances& tol = {});

  /// Builds U diag(lambda) U* from a decomposition whose eigenvalues are
  /// already nonnegative. Eigenvalues are re-sorted ascending if needed.
  static PsdMatrix from_spectrum(SpectralDecomposition sd);
  static PsdMatrix identity(Index n);
  static PsdMatrix zero(Index n);

  Index dim() const { return h_.dim(); }
  const HermitianMatrix& hermitian() const { return h_; }
  const Matrix& matrix() const { return h_.matrix(); }
  const SpectralDecomposition& spectrum() const { return sd_; }
  const RealVector& eigenvalues() const { return sd_.eigenvalues; }
  double trace() const { return h_.trace(); }

  /// Smallest eigenvalue observed before clamping.
  double eigen_floor() const { return eigen_floor_; }
  double max_eigenvalue() const;

  PsdMatrix operator+(const PsdMatrix& o) const;
  PsdMatrix operator*(double t) const;

 private:
  HermitianMatrix h_;
  SpectralDecomposition sd_;
  double eigen_floor_ = 0.0;
};

SpectralDecomposition eigh(const HermitianMatrix& a);

/// Validating overload: throws kNonHermitianInput.
SpectralDecomposition eigh(const Matrix& a, const Tolerances& tol = {});

/// A^s = U diag(lambda^s) U*. A^0 is the support projector. Negative s
/// requires every eigenvalue above tol.sing * lambda_max.
PsdMatrix matrix_power(const PsdMatrix& a, double s, const Tolerances& tol = {});

/// Tr A^s computed from the spectrum (same conventions as matrix_power).
double trace_power(const PsdMatrix& a, double s, const Tolerances& tol = {});

/// (sum |lambda_i|^q)^(1/q); q = kInf gives max |lambda_i|. q < 1 is a
/// quasi-norm but still returned.
double schatten_norm(const HermitianMatrix& a, double q);
double schatten_norm(const PsdMatrix& a, double q);

/// Schatten norm of a general square matrix from its singular values.
double schatten_norm_general(const Matrix& a, double q);
double operator_norm(const Matrix& a);

/// Tr(rho ln rho), with 0 ln 0 = 0 (eigenvalues at or below tol.sing *
/// lambda_max contribute nothing).
double trace_xlogx(const PsdMatrix& rho, const Tolerances& tol = {});

/// Symmetrize and clamp every negative eigenvalue to zero, no tolerance.
PsdMatrix clamp_to_psd(const Matrix& m);

double relative_frobenius_error(const Matrix& actual, const Matrix& expected);

enum class Regime { kConvex, kConcave, kNeither };
const char* regime_name(Regime r) noexcept;

/// Exponents (p, q) of the trace functionals with r = p / q.
class ExponentPair {
 public:
  ExponentPair(double p, double q);

  double p() const { return p_; }
  double q() const { return q_; }
  double r() const { return p_ / q_; }

  /// kConvex iff 1 <= p <= 2 and q >= 1; kConcave iff 0 < p <= q <= 1.
  Regime regime() const;

 private:
  double p_;
  double q_;
};

}  // namespace tracecvx
