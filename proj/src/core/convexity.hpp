#pragma once

// Randomized midpoint-convexity certification of the trace functionals and
// constructive refutation for p > 2.
//
// A midpoint gap is  1/2 f(x0) + 1/2 f(x1) - f((x0 + x1)/2), taken
// componentwise for functions of several matrices. Convexity means gap >= 0.
// A gap is judged against gap_tol = rel_tol * scale, where scale is the
// largest |f| among the three evaluations.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/functionals.hpp"
#include "core/matcore.hpp"

namespace tracecvx {

enum class FunctionalId { kPhi, kPsi, kUpsilon, kJointTrace, kSkew };

const char* functional_name(FunctionalId id) noexcept;
std::optional<FunctionalId> parse_functional(const std::string& name);

enum class Verdict { kConsistentConvex, kConsistentConcave, kViolation, kUnchecked };

const char* verdict_name(Verdict v) noexcept;

inline constexpr double kGapRelTol = 1e-9;

struct GapSample {
  double gap = 0.0;
  double f0 = 0.0;
  double f1 = 0.0;
  double fmid = 0.0;

  double scale() const;
  double tolerance(double rel_tol = kGapRelTol) const { return rel_tol * scale(); }
};

using Evaluator = std::function<double(std::span<const PsdMatrix>)>;

/// x0 and x1 must have the same number of components with matching
/// dimensions.
GapSample midpoint_gap(const Evaluator& f, std::span<const PsdMatrix> x0,
                       std::span<const PsdMatrix> x1);

/// Regime claimed for a functional at (p, q). PHI, PSI and UPSILON follow
/// ExponentPair::regime(); JOINT_TRACE, the map (A, B) -> Tr A^p K* B^{1-r} K,
/// is convex for 1 <= r <= p <= 2 and concave for 0 < p <= r <= 1; SKEW is
/// convex for every (p, q).
Regime claimed_regime(FunctionalId id, const ExponentPair& exps);

/// Regime of (A, B) -> Tr A^p K* B^{1-r} K in terms of (p, r).
Regime ando_lieb_regime(double p, double r);

Verdict classify_gap(Regime regime, double gap, double gap_tol);

struct GapReport {
  FunctionalId functional = FunctionalId::kPhi;
  double p = 0.0;
  double q = 0.0;
  std::vector<Index> dims;
  int m = 0;  // number of PHI arguments, 0 otherwise
  std::uint64_t seed = 0;  // per-trial seed
  std::uint64_t trial = 0;
  double gap = 0.0;
  double scale = 0.0;
  Verdict verdict = Verdict::kUnchecked;
};

struct CertifyOptions {
  FunctionalId functional = FunctionalId::kPhi;
  double p = 1.0;
  double q = 1.0;
  /// PHI, UPSILON, JOINT_TRACE, SKEW: {dim}; PSI: {d1, d2}.
  std::vector<Index> dims{2};
  int m = 2;
  int trials = 200;
  std::uint64_t seed = 0;
  double rel_tol = kGapRelTol;
  int jobs = 1;
};

/// One seeded trial; depends only on (options, trial).
GapReport certify_trial(const CertifyOptions& options, std::uint64_t trial);

/// All trials, sorted by trial index regardless of `jobs`.
std::vector<GapReport> certify_regime(const CertifyOptions& options);

size_t count_violations(std::span<const GapReport> reports);

/// Midpoint gap of A -> phi(tA, B) with B fixed (m = 2).
GapSample phi_first_argument_gap(const PsdMatrix& a1, const PsdMatrix& a2, const PsdMatrix& b,
                                 const ExponentPair& exps, double t,
                                 const Tolerances& tol = {});

/// Leading-order prediction of phi_first_argument_gap:
///   (t^p/p) ||B||_q^{1-q} [1/2 Tr A1^p B^{q-p} + 1/2 Tr A2^p B^{q-p}
///                          - Tr ((A1+A2)/2)^p B^{q-p}].
double taylor_gap_prediction(const PsdMatrix& a1, const PsdMatrix& a2, const PsdMatrix& b,
                             const ExponentPair& exps, double t, const Tolerances& tol = {});

struct Counterexample {
  PsdMatrix a1;
  PsdMatrix a2;
  ExponentPair exps{3.0, 1.0};
  Eigen::VectorXcd v;  // makes the operator midpoint gap of A^p negative
  Eigen::VectorXcd w;  // makes it positive
  PsdMatrix b_negative;  // B built from v
  PsdMatrix b_positive;  // B built from w
  double epsilon = 0.0;  // regularization in (eps I + vv*)^{-1}; 0 when q > p
  double t_negative = 0.0;
  double t_positive = 0.0;
  double gap_negative = 0.0;
  double gap_positive = 0.0;
  double tol_negative = 0.0;  // gap_tol at the negative witness
  double tol_positive = 0.0;
  int pairs_tried = 0;
};

struct CounterexampleBudget {
  /// Random (A1, A2) pairs to try. For each pair the witnesses v and w are
  /// the extreme eigenvectors of 1/2 A1^p + 1/2 A2^p - ((A1+A2)/2)^p.
  int matrix_pairs = 100;
  double rel_tol = kGapRelTol;
  /// A witness must clear this multiple of gap_tol.
  double margin = 10.0;
};

/// Searches for a pair A1, A2 and vectors v, w showing that phi_{p,q} is
/// neither convex nor concave in its first argument. Requires p > 2 and
/// q != p (kBadRegime otherwise); kSearchExhausted if the budget runs out.
Counterexample find_counterexample(const ExponentPair& exps, Index dim, std::uint64_t seed,
                                   const CounterexampleBudget& budget = {},
                                   const Tolerances& tol = {});

struct BridgeGap {
  double lhs_gap = 0.0;    // f(t)
  double predicted = 0.0;  // leading t^p term
  double scale = 0.0;      // max |phi| among the three evaluations
};

/// f(t) = 1/2 phi_{p,1}(tA1, B1) + 1/2 phi_{p,1}(tA2, B2)
///        - phi_{p,1}(t(A1+A2)/2, (B1+B2)/2)
/// and its leading prediction (t^p/p)[1/2 Tr A1^p B1^{1-p} + ... ].
BridgeGap bekjan_bridge_gap(const PsdMatrix& a1, const PsdMatrix& a2, const PsdMatrix& b1,
                            const PsdMatrix& b2, double p, double t,
                            const Tolerances& tol = {});

/// True when the two numbers do not have strictly opposite signs once
/// values within `tol` of zero are treated as zero.
bool signs_agree(double x, double y, double tol);

/// Midpoint gap of (A, B) -> Tr A^p K* B^{1-r} K.
GapSample ando_lieb_gap(const PsdMatrix& a1, const PsdMatrix& a2, const PsdMatrix& b1,
                        const PsdMatrix& b2, const Matrix& k, double p, double r,
                        const Tolerances& tol = {});

/// Midpoint gap of (A, X) -> Tr(A^{p/2} B X^{1-r} B* A^{p/2}) for fixed B.
GapSample joint_objective_gap(const PsdMatrix& a1, const PsdMatrix& a2, const PsdMatrix& x1,
                              const PsdMatrix& x2, const Matrix& b, double p, double r,
                              const Tolerances& tol = {});

}  // namespace tracecvx
