#pragma once

// Decomposition-infimum L^q(L^p) norm on H1 (x) H2:
//
//   |||X||| = inf { psi(A) + psi(B) : X = A - B, A >= 0, B >= 0 }
//
// for Hermitian X, and ||A|| = 1/2 |||[[0, A], [A*, 0]]||| for general A.
//
// The infimum is approximated from above. Feasible points are written as
// A = X+ + R, B = X- + R with Hermitian R constrained by X+ + R >= 0 and
// X- + R >= 0; this covers every decomposition. R = 0 is the Jordan
// decomposition, so the returned value never exceeds psi(X+) + psi(X-).

#include <cstdint>
#include <optional>
#include <vector>

#include "core/matcore.hpp"
#include "core/tensor.hpp"

namespace tracecvx {

struct Decomposition {
  PsdMatrix a;
  PsdMatrix b;

  /// a - b, the decomposed operator.
  Matrix target() const { return a.matrix() - b.matrix(); }
};

/// X = X+ - X- with X+ X- = 0.
Decomposition jordan_decomposition(const HermitianMatrix& x);

struct OptimizerBudget {
  int max_iters = 500;
  /// Stop once the projected-gradient mapping has Frobenius norm below this.
  /// The objective is positively homogeneous of degree 1, so the gradient is
  /// scale free.
  double grad_tol = 1e-7;
  /// Wall-clock cap in seconds; 0 disables it. A nonzero cap makes results
  /// depend on machine speed.
  double time_cap = 0.0;
};

struct NormResult {
  double value = 0.0;
  Decomposition decomposition;
  double start_value = 0.0;  // objective at the starting point
  int iterations = 0;        // accepted descent steps
  bool converged = false;    // grad_tol reached before the budget ran out
  /// Objective after each accepted step, starting with start_value.
  std::vector<double> history;
};

/// |||X||| for a bipartite Hermitian X. (p, q) must be in the convex regime
/// 1 <= p <= 2, q >= 1 (kBadRegime otherwise); kNotBipartite for other
/// spaces. `start` overrides the Jordan starting point; its difference must
/// equal X up to 1e-10 relative Frobenius error (kInvalidArgument).
NormResult lqlp_selfadjoint_norm(const LabeledMatrix& x, const ExponentPair& exps,
                                 const OptimizerBudget& budget = {},
                                 const std::optional<Decomposition>& start = std::nullopt,
                                 const Tolerances& tol = {});

enum class BlockGrouping {
  /// H1 (x) (H2 (x) C^2): space (d1, 2 d2).
  kTracedSlot,
  /// (C^2 (x) H1) (x) H2: space (2 d1, d2).
  kFirstSlot,
};

const char* grouping_name(BlockGrouping g) noexcept;

struct BlockEmbedding {
  Matrix source;
  BlockGrouping grouping = BlockGrouping::kTracedSlot;
  LabeledMatrix embedded;
};

/// [[0, A], [A*, 0]] with the C^2 block index regrouped per `grouping`.
/// `space` must have two factors (kNotBipartite) matching A (kDimMismatch).
BlockEmbedding block_embed(const Matrix& a, const TensorSpace& space,
                           BlockGrouping grouping = BlockGrouping::kTracedSlot);

/// Places a 2 x 2 block operator [[m00, m01], [m10, m11]] (blocks on
/// H1 (x) H2) into the basis used by block_embed with the same grouping.
Matrix block_matrix(const Matrix& m00, const Matrix& m01, const Matrix& m10, const Matrix& m11,
                    const TensorSpace& space, BlockGrouping grouping);

/// Starting decomposition of the embedding of a Hermitian A = P - Q:
/// 1/2 [[P+Q, P-Q], [P-Q, P+Q]] minus 1/2 [[P+Q, Q-P], [Q-P, P+Q]].
Decomposition induced_block_decomposition(const Decomposition& d, const TensorSpace& space,
                                          BlockGrouping grouping);

struct GeneralNormResult {
  double value = 0.0;  // half the self-adjoint norm of the embedding
  BlockGrouping grouping = BlockGrouping::kTracedSlot;
  NormResult embedded;
};

/// ||A|| = 1/2 |||block_embed(A)|||. `start` is a decomposition of the
/// embedding (e.g. from induced_block_decomposition).
GeneralNormResult lqlp_general_norm(const Matrix& a, const TensorSpace& space,
                                    const ExponentPair& exps,
                                    BlockGrouping grouping = BlockGrouping::kTracedSlot,
                                    const OptimizerBudget& budget = {},
                                    const std::optional<Decomposition>& start = std::nullopt,
                                    const Tolerances& tol = {});

struct UnitaryMixCheck {
  /// Largest deviation in the exact identities:
  ///   U [[B+C, B-C], [B-C, B+C]] U* = 2 (B (+) C),
  ///   U [[B+C, C-B], [C-B, B+C]] U* = 2 (C (+) B),
  ///   U (B-C (+) C-B) U* = [[0, B-C], [B-C, 0]],
  /// and psi of the mixed matrices against psi of 2 (B (+) C), 2 (C (+) B),
  /// in both groupings. Relative for the psi values.
  double max_deviation = 0.0;
  double psi_b = 0.0;
  double psi_c = 0.0;
  /// psi(B (+) C) with the block index in the traced factor; at most
  /// psi_b + psi_c.
  double psi_block_traced = 0.0;
  /// psi(B (+) C) with the block index in the first factor; equals
  /// (psi_b^q + psi_c^q)^{1/q}.
  double psi_block_first = 0.0;
};

/// B and C are PSD on the bipartite `space`.
UnitaryMixCheck unitary_mix_identity_check(const PsdMatrix& b, const PsdMatrix& c,
                                           const TensorSpace& space, const ExponentPair& exps,
                                           const Tolerances& tol = {});

struct MonotonicityWitness {
  PsdMatrix a;        // smaller operator
  PsdMatrix a_prime;  // a_prime - a is PSD
  double psi_a = 0.0;
  double psi_a_prime = 0.0;  // < psi_a
  int attempts = 0;
};

/// Seeded search for PSD A <= A' with psi(A) > psi(A'). Candidates are
/// A = Wishart, A' = A + s vv* for small s and a unit vector v chosen to
/// decrease psi to first order. Returns nullopt if `attempts` run out.
std::optional<MonotonicityWitness> find_psi_nonmonotonicity(const TensorSpace& space,
                                                            const ExponentPair& exps,
                                                            std::uint64_t seed,
                                                            int attempts = 2000,
                                                            const Tolerances& tol = {});

}  // namespace tracecvx
