#pragma once

// Tripartite Minkowski trace inequality, von Neumann entropy and strong
// subadditivity, and the finite-difference link between them.
//
// For A >= 0 on H1 (x) H2 (x) H3:
//   lhs = Tr_3 ( Tr_2 [ (Tr_1 A^q)^{p/q} ] )^{q/p}
//   rhs = Tr_3 Tr_1 [ (Tr_2 A^p)^{q/p} ]
// lhs <= rhs for 1 <= q <= p <= 2, and lhs >= rhs for 0 < p <= 1, q >= p.

#include <cstdint>

#include "core/matcore.hpp"
#include "core/tensor.hpp"

namespace tracecvx {

inline constexpr double kUnitTraceTol = 1e-10;

/// PSD operator on a 2- or 3-factor space with |Tr - 1| <= 1e-10.
class DensityMatrix {
 public:
  /// kNotPsd for a non-PSD input, kNotADensityMatrix for a bad trace or a
  /// space with other than 2 or 3 factors.
  explicit DensityMatrix(const LabeledMatrix& rho, const Tolerances& tol = {});

  const TensorSpace& space() const { return labeled_.space(); }
  const LabeledMatrix& labeled() const { return labeled_; }
  const PsdMatrix& psd() const { return psd_; }

 private:
  LabeledMatrix labeled_;
  PsdMatrix psd_;
};

enum class Direction { kLE, kGE, kUnchecked };
const char* direction_name(Direction d) noexcept;

/// kLE for 1 <= q <= p <= 2, kGE for 0 < p <= 1 and q >= p.
Direction minkowski_direction(const ExponentPair& exps);

struct MinkowskiVerdict {
  double lhs = 0.0;
  double rhs = 0.0;
  double p = 0.0;
  double q = 0.0;
  Direction direction = Direction::kUnchecked;
  /// rhs - lhs for kLE and kUnchecked, lhs - rhs for kGE.
  double margin = 0.0;

  double scale() const;
  /// margin >= -rel_tol * scale; always true when unchecked.
  bool holds(double rel_tol = 1e-9) const;
};

/// kNotTripartite unless the space has three factors.
MinkowskiVerdict minkowski_sides(const LabeledMatrix& a, const ExponentPair& exps,
                                 const Tolerances& tol = {});

/// Bipartite input lifted to (d1, d2, 1); kNotBipartite otherwise.
MinkowskiVerdict minkowski_two_space(const LabeledMatrix& a, const ExponentPair& exps,
                                     const Tolerances& tol = {});

/// S(rho) = -Tr rho ln rho in nats. kNotADensityMatrix unless
/// |Tr rho - 1| <= 1e-10.
double entropy(const PsdMatrix& rho, const Tolerances& tol = {});

/// S(rho_13) + S(rho_23) - S(rho_123) - S(rho_3). kNotTripartite unless the
/// space has three factors.
double ssa_gap(const DensityMatrix& rho, const Tolerances& tol = {});

struct SsaBridge {
  double eps = 0.0;
  double f1 = 0.0;  // Tr[(Tr_2 rho^{1+eps})^{1/(1+eps)}]
  double f2 = 0.0;  // Tr_3[(Tr_2 rho_23^{1+eps})^{1/(1+eps)}]
  double slope1 = 0.0;  // (f1 - 1) / eps
  double slope2 = 0.0;  // (f2 - 1) / eps
  double limit1 = 0.0;  // S(rho_13) - S(rho)
  double limit2 = 0.0;  // S(rho_3) - S(rho_23)
  /// (f1 - f2) / eps, the q = 1 Minkowski margin at p = 1 + eps divided by
  /// eps; tends to ssa_gap as eps -> 0.
  double margin_slope = 0.0;
  double ssa_gap = 0.0;
};

/// Requires 0 < eps <= 0.1 (kInvalidArgument) and a tripartite state.
SsaBridge ssa_from_minkowski(const DensityMatrix& rho, double eps, const Tolerances& tol = {});

}  // namespace tracecvx
