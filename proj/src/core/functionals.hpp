#pragma once

// Trace functionals
//
//   phi(A_1..A_m)  = || (sum_j A_j^p)^{1/p} ||_q
//   psi(A)         = || (Tr_2 A^p)^{1/p} ||_q
//   upsilon(A; B)  = Tr[(B* A^p B)^{q/p}]
//
// together with the variational representation of upsilon, the bilinear
// trace form Tr A^s K* B^t K, unitary dilation of contractions, and
// Wigner-Yanase skew information.
//
// None of these check the convexity regime of (p, q); they are plain
// evaluators and are used in every regime.

#include <cstdint>
#include <span>
#include <vector>

#include "core/matcore.hpp"
#include "core/tensor.hpp"

namespace tracecvx {

double phi(std::span<const PsdMatrix> matrices, const ExponentPair& exps,
           const Tolerances& tol = {});

/// Traces out factor 2; throws kNotBipartite unless the space has two factors.
double psi(const LabeledMatrix& a, const ExponentPair& exps, const Tolerances& tol = {});
double psi(const PsdMatrix& a, const TensorSpace& space, const ExponentPair& exps,
           const Tolerances& tol = {});

/// B is any square matrix of matching dimension.
double upsilon(const PsdMatrix& a, const Matrix& b, const ExponentPair& exps,
               const Tolerances& tol = {});

/// Same value through Tr[(A^{p/2} B B* A^{p/2})^{q/p}].
double upsilon_altform(const PsdMatrix& a, const Matrix& b, const ExponentPair& exps,
                       const Tolerances& tol = {});

struct VariationalProbe {
  PsdMatrix a;
  Matrix b;
  ExponentPair exps;
  PsdMatrix x;
};

/// (1/r) Tr[A^{p/2} B X^{1-r} B* A^{p/2} + (r-1) X], r = p/q.
/// Throws kSingularProbe when r > 1 and X is not strictly positive.
double variational_objective(const VariationalProbe& probe, const Tolerances& tol = {});

struct VariationalMinimizer {
  PsdMatrix x;         // (B* A^p B)^{1/r}
  double shift = 0.0;  // regularization added to A, 0 when none was needed
};

/// Closed-form optimizer of the variational objective: an infimum for r > 1,
/// a supremum for r < 1. If B* A^p B is singular, kSingularCore is thrown
/// unless `regularize` is set, in which case A is shifted by
/// 1e-10 * lambda_max(A) (reported in `shift`).
VariationalMinimizer variational_minimizer(const PsdMatrix& a, const Matrix& b,
                                           const ExponentPair& exps,
                                           bool regularize = false,
                                           const Tolerances& tol = {});

struct VariationalCertificate {
  double upsilon = 0.0;
  double objective_at_minimizer = 0.0;
  /// Largest amount by which a random probe improved on the minimizer
  /// (lower for r > 1, higher for r < 1). Non-positive when certified.
  double best_probe_advantage = 0.0;
  int probes = 0;
};

VariationalCertificate certify_variational_minimizer(const PsdMatrix& a, const Matrix& b,
                                                     const ExponentPair& exps, int probes,
                                                     std::uint64_t seed,
                                                     const Tolerances& tol = {});

/// Tr(A^s K* B^t K).
double joint_trace_form(const PsdMatrix& a, const PsdMatrix& b, const Matrix& k, double s,
                        double t, const Tolerances& tol = {});

/// Vectorization convention: K^vec stacks the rows of K*, i.e.
/// K^vec[i*n + j] = conj(K(j, i)). With it,
///   Tr(A^s K* B^t K) = <K^vec, (A^s (x) conj(B)^t) K^vec>.
Eigen::VectorXcd vectorize(const Matrix& k);

/// <K^vec, (A^s (x) conj(B)^t) K^vec>, the tensor form of joint_trace_form.
double joint_trace_form_vectorized(const PsdMatrix& a, const PsdMatrix& b, const Matrix& k,
                                   double s, double t, const Tolerances& tol = {});

struct Dilation {
  Matrix unitary;        // [[K, L], [-L, K]]
  Matrix polar_unitary;  // U in K = U|K|
  Matrix defect;         // L = U (I - |K|^2)^{1/2}
};

/// Unitary dilation of a contraction (||K||_inf <= 1 + 1e-12), otherwise
/// kNotAContraction.
///
/// The polar factor is built from the spectral decomposition of K*K. On the
/// kernel of K it is completed by Gram-Schmidt against the standard basis in
/// index order, so the result is deterministic.
Dilation dilate_contraction(const Matrix& k, const Tolerances& tol = {});

struct TraceIdentity {
  double original = 0.0;  // Tr(A^s K B^t K*)
  double dilated = 0.0;   // Tr((A+0)^s W (B+0)^t W*)
};

/// Both sides of the dilation identity. Powers of A (+) 0 and B (+) 0 are
/// taken on the support, so negative exponents are allowed when A and B are
/// strictly positive.
TraceIdentity dilation_trace_identity(const PsdMatrix& a, const PsdMatrix& b, const Matrix& k,
                                      double s, double t, const Tolerances& tol = {});

struct SkewInformation {
  double difference_form = 0.0;  // Tr K^2 rho - Tr sqrt(rho) K sqrt(rho) K
  double commutator_form = 0.0;  // -Tr([sqrt(rho), K]^2)
  /// commutator_form / difference_form; 2 for Hermitian K (NaN when both
  /// vanish).
  double ratio = 0.0;
};

/// Throws kNotADensityMatrix unless |Tr rho - 1| <= 1e-10.
SkewInformation skew_information(const PsdMatrix& rho, const HermitianMatrix& k,
                                 const Tolerances& tol = {});

}  // namespace tracecvx
