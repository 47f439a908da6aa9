#include "core/inequalities.hpp"

#include <cmath>
#include <sstream>

namespace tracecvx {

namespace {

void require_factors(const TensorSpace& space, size_t n, ErrorCode code, const char* what) {
  if (space.num_factors() != n) {
    std::ostringstream os;
    os << what << " needs " << n << " tensor factors, got " << space.num_factors();
    fail(code, os.str());
  }
}

void require_unit_trace(double tr) {
  if (!(std::abs(tr - 1.0) <= kUnitTraceTol)) {
    std::ostringstream os;
    os.precision(17);
    os << "density matrix must have unit trace, got " << tr;
    fail(ErrorCode::kNotADensityMatrix, os.str());
  }
}

// Partial trace of a PSD matrix, re-clamped so round-off cannot make the
// following fractional power fail.
PsdMatrix reduce(const PsdMatrix& a, const TensorSpace& space, int factor) {
  return clamp_to_psd(partial_trace(a.matrix(), space, factor));
}

}  // namespace

DensityMatrix::DensityMatrix(const LabeledMatrix& rho, const Tolerances& tol)
    : labeled_(rho), psd_(rho.hermitian(), tol) {
  const size_t n = rho.space().num_factors();
  if (n != 2 && n != 3) {
    fail(ErrorCode::kNotADensityMatrix, "density matrices live on 2 or 3 tensor factors");
  }
  require_unit_trace(psd_.trace());
}

const char* direction_name(Direction d) noexcept {
  switch (d) {
    case Direction::kLE: return "LE";
    case Direction::kGE: return "GE";
    case Direction::kUnchecked: return "UNCHECKED";
  }
  return "UNCHECKED";
}

Direction minkowski_direction(const ExponentPair& exps) {
  const double p = exps.p();
  const double q = exps.q();
  if (1.0 <= q && q <= p && p <= 2.0) return Direction::kLE;
  if (p <= 1.0 && q >= p) return Direction::kGE;
  return Direction::kUnchecked;
}

double MinkowskiVerdict::scale() const { return std::max(std::abs(lhs), std::abs(rhs)); }

bool MinkowskiVerdict::holds(double rel_tol) const {
  return direction == Direction::kUnchecked || margin >= -rel_tol * scale();
}

MinkowskiVerdict minkowski_sides(const LabeledMatrix& a, const ExponentPair& exps,
                                 const Tolerances& tol) {
  require_factors(a.space(), 3, ErrorCode::kNotTripartite, "Minkowski inequality");
  const TensorSpace& space = a.space();
  const PsdMatrix ap = a.psd(tol);
  const double p = exps.p();
  const double q = exps.q();

  // lhs: Tr_1 A^q lives on (2, 3); its (p/q)-power traced over 2 lives on 3.
  const PsdMatrix t1 = reduce(matrix_power(ap, q, tol), space, 1);
  const PsdMatrix inner = matrix_power(t1, p / q, tol);
  const PsdMatrix t2 = reduce(inner, space.without(1), 1);
  const double lhs = trace_power(t2, q / p, tol);

  // rhs: Tr_2 A^p lives on (1, 3).
  const PsdMatrix t3 = reduce(matrix_power(ap, p, tol), space, 2);
  const double rhs = trace_power(t3, q / p, tol);

  MinkowskiVerdict v;
  v.lhs = lhs;
  v.rhs = rhs;
  v.p = p;
  v.q = q;
  v.direction = minkowski_direction(exps);
  v.margin = v.direction == Direction::kGE ? lhs - rhs : rhs - lhs;
  return v;
}

MinkowskiVerdict minkowski_two_space(const LabeledMatrix& a, const ExponentPair& exps,
                                     const Tolerances& tol) {
  require_factors(a.space(), 2, ErrorCode::kNotBipartite, "two-space Minkowski inequality");
  const TensorSpace lifted({a.space().factor_dim(1), a.space().factor_dim(2), 1});
  return minkowski_sides(LabeledMatrix(lifted, a.hermitian()), exps, tol);
}

double entropy(const PsdMatrix& rho, const Tolerances& tol) {
  require_unit_trace(rho.trace());
  return -trace_xlogx(rho, tol);
}

double ssa_gap(const DensityMatrix& rho, const Tolerances& tol) {
  require_factors(rho.space(), 3, ErrorCode::kNotTripartite, "strong subadditivity");
  const LabeledMatrix& r = rho.labeled();
  auto s = [&](std::vector<int> traced) {
    const LabeledMatrix red = partial_trace(r, std::move(traced));
    return -trace_xlogx(clamp_to_psd(red.matrix()), tol);
  };
  return s({2}) + s({1}) + trace_xlogx(rho.psd(), tol) - s({1, 2});
}

SsaBridge ssa_from_minkowski(const DensityMatrix& rho, double eps, const Tolerances& tol) {
  require_factors(rho.space(), 3, ErrorCode::kNotTripartite, "entropy bridge");
  if (!(eps > 0.0 && eps <= 0.1)) {
    fail(ErrorCode::kInvalidArgument, "eps must lie in (0, 0.1]");
  }
  const LabeledMatrix& r = rho.labeled();
  const MinkowskiVerdict mv = minkowski_sides(r, ExponentPair(1.0 + eps, 1.0), tol);
  auto s = [&](std::vector<int> traced) {
    const LabeledMatrix red = partial_trace(r, std::move(traced));
    return -trace_xlogx(clamp_to_psd(red.matrix()), tol);
  };
  const double s123 = -trace_xlogx(rho.psd(), tol);
  const double s13 = s({2});
  const double s23 = s({1});
  const double s3 = s({1, 2});

  SsaBridge b;
  b.eps = eps;
  b.f1 = mv.rhs;
  b.f2 = mv.lhs;
  b.slope1 = (b.f1 - 1.0) / eps;
  b.slope2 = (b.f2 - 1.0) / eps;
  b.limit1 = s13 - s123;
  b.limit2 = s3 - s23;
  b.margin_slope = (b.f1 - b.f2) / eps;
  b.ssa_gap = s13 + s23 - s123 - s3;
  return b;
}

}  // namespace tracecvx
