#include "core/convexity.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "core/parallel.hpp"
#include "core/sampling.hpp"
#include "core/tensor.hpp"

namespace tracecvx {

const char* functional_name(FunctionalId id) noexcept {
  switch (id) {
    case FunctionalId::kPhi: return "PHI";
    case FunctionalId::kPsi: return "PSI";
    case FunctionalId::kUpsilon: return "UPSILON";
    case FunctionalId::kJointTrace: return "JOINT_TRACE";
    case FunctionalId::kSkew: return "SKEW";
  }
  return "PHI";
}

std::optional<FunctionalId> parse_functional(const std::string& name) {
  std::string up;
  for (char c : name) up += (c == '-') ? '_' : static_cast<char>(std::toupper(c));
  for (FunctionalId id : {FunctionalId::kPhi, FunctionalId::kPsi, FunctionalId::kUpsilon,
                          FunctionalId::kJointTrace, FunctionalId::kSkew}) {
    if (up == functional_name(id)) return id;
  }
  return std::nullopt;
}

const char* verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::kConsistentConvex: return "CONSISTENT_CONVEX";
    case Verdict::kConsistentConcave: return "CONSISTENT_CONCAVE";
    case Verdict::kViolation: return "VIOLATION";
    case Verdict::kUnchecked: return "UNCHECKED";
  }
  return "UNCHECKED";
}

double GapSample::scale() const {
  return std::max({std::abs(f0), std::abs(f1), std::abs(fmid)});
}

GapSample midpoint_gap(const Evaluator& f, std::span<const PsdMatrix> x0,
                       std::span<const PsdMatrix> x1) {
  if (x0.size() != x1.size()) {
    fail(ErrorCode::kDimMismatch, "midpoint endpoints have different arity");
  }
  std::vector<PsdMatrix> mid;
  mid.reserve(x0.size());
  for (size_t i = 0; i < x0.size(); ++i) {
    if (x0[i].dim() != x1[i].dim()) {
      fail(ErrorCode::kDimMismatch, "midpoint endpoints have different dimensions");
    }
    if (x0[i].matrix() == x1[i].matrix()) {
      mid.push_back(x0[i]);  // keeps the gap exactly zero for equal endpoints
    } else {
      mid.push_back(clamp_to_psd(0.5 * (x0[i].matrix() + x1[i].matrix())));
    }
  }
  GapSample g;
  g.f0 = f(x0);
  g.f1 = f(x1);
  g.fmid = f(mid);
  g.gap = 0.5 * g.f0 + 0.5 * g.f1 - g.fmid;
  return g;
}

Regime ando_lieb_regime(double p, double r) {
  if (1.0 <= r && r <= p && p <= 2.0) return Regime::kConvex;
  if (0.0 < p && p <= r && r <= 1.0) return Regime::kConcave;
  return Regime::kNeither;
}

Regime claimed_regime(FunctionalId id, const ExponentPair& exps) {
  switch (id) {
    case FunctionalId::kPhi:
    case FunctionalId::kPsi:
    case FunctionalId::kUpsilon:
      return exps.regime();
    case FunctionalId::kJointTrace:
      return ando_lieb_regime(exps.p(), exps.r());
    case FunctionalId::kSkew:
      return Regime::kConvex;
  }
  return Regime::kNeither;
}

Verdict classify_gap(Regime regime, double gap, double gap_tol) {
  switch (regime) {
    case Regime::kConvex:
      return gap < -gap_tol ? Verdict::kViolation : Verdict::kConsistentConvex;
    case Regime::kConcave:
      return gap > gap_tol ? Verdict::kViolation : Verdict::kConsistentConcave;
    case Regime::kNeither:
      return Verdict::kUnchecked;
  }
  return Verdict::kUnchecked;
}

// ---------------------------------------------------------------------------
// Regime certification

namespace {

Index require_dim(const CertifyOptions& o, size_t count) {
  if (o.dims.size() != count) {
    std::ostringstream os;
    os << functional_name(o.functional) << " certification needs " << count
       << " dimension(s), got " << o.dims.size();
    fail(ErrorCode::kInvalidArgument, os.str());
  }
  for (Index d : o.dims) {
    if (d < 1) fail(ErrorCode::kInvalidArgument, "dimensions must be positive");
  }
  return o.dims[0];
}

GapSample run_trial(const CertifyOptions& o, const ExponentPair& exps, Rng& rng) {
  switch (o.functional) {
    case FunctionalId::kPhi: {
      const Index n = require_dim(o, 1);
      if (o.m < 1) fail(ErrorCode::kInvalidArgument, "phi needs m >= 1");
      std::vector<PsdMatrix> x0, x1;
      for (int j = 0; j < o.m; ++j) x0.push_back(wishart(rng, n));
      for (int j = 0; j < o.m; ++j) x1.push_back(wishart(rng, n));
      return midpoint_gap([&](std::span<const PsdMatrix> a) { return phi(a, exps); }, x0, x1);
    }
    case FunctionalId::kPsi: {
      require_dim(o, 2);
      const TensorSpace space(o.dims);
      const std::array<PsdMatrix, 1> x0{wishart(rng, space.total_dim())};
      const std::array<PsdMatrix, 1> x1{wishart(rng, space.total_dim())};
      return midpoint_gap(
          [&](std::span<const PsdMatrix> a) { return psi(a[0], space, exps); }, x0, x1);
    }
    case FunctionalId::kUpsilon: {
      const Index n = require_dim(o, 1);
      const Matrix b = gaussian_matrix(rng, n, n);
      const std::array<PsdMatrix, 1> x0{wishart(rng, n)};
      const std::array<PsdMatrix, 1> x1{wishart(rng, n)};
      return midpoint_gap(
          [&](std::span<const PsdMatrix> a) { return upsilon(a[0], b, exps); }, x0, x1);
    }
    case FunctionalId::kJointTrace: {
      const Index n = require_dim(o, 1);
      const Matrix k = gaussian_matrix(rng, n, n);
      const double p = exps.p();
      const double t = 1.0 - exps.r();
      const std::array<PsdMatrix, 2> x0{wishart(rng, n, 1e-6), wishart(rng, n, 1e-6)};
      const std::array<PsdMatrix, 2> x1{wishart(rng, n, 1e-6), wishart(rng, n, 1e-6)};
      return midpoint_gap(
          [&](std::span<const PsdMatrix> a) { return joint_trace_form(a[0], a[1], k, p, t); },
          x0, x1);
    }
    case FunctionalId::kSkew: {
      const Index n = require_dim(o, 1);
      const HermitianMatrix k = random_hermitian(rng, n);
      const std::array<PsdMatrix, 1> x0{random_density_matrix(rng, n)};
      const std::array<PsdMatrix, 1> x1{random_density_matrix(rng, n)};
      // The midpoint of two unit-trace matrices is re-normalized to absorb
      // round-off in the trace check.
      return midpoint_gap(
          [&](std::span<const PsdMatrix> a) {
            return skew_information(a[0] * (1.0 / a[0].trace()), k).difference_form;
          },
          x0, x1);
    }
  }
  fail(ErrorCode::kInvalidArgument, "unknown functional");
}

}  // namespace

GapReport certify_trial(const CertifyOptions& o, std::uint64_t trial) {
  const ExponentPair exps(o.p, o.q);
  GapReport rep;
  rep.functional = o.functional;
  rep.p = o.p;
  rep.q = o.q;
  rep.dims = o.dims;
  rep.m = o.functional == FunctionalId::kPhi ? o.m : 0;
  rep.trial = trial;
  rep.seed = derive_seed(o.seed, trial);
  Rng rng(rep.seed);
  const GapSample g = run_trial(o, exps, rng);
  rep.gap = g.gap;
  rep.scale = g.scale();
  rep.verdict = classify_gap(claimed_regime(o.functional, exps), g.gap, g.tolerance(o.rel_tol));
  return rep;
}

std::vector<GapReport> certify_regime(const CertifyOptions& o) {
  if (o.trials < 1) fail(ErrorCode::kInvalidArgument, "trials must be >= 1");
  ExponentPair(o.p, o.q);
  std::vector<GapReport> out(static_cast<size_t>(o.trials));
  parallel_for(out.size(), o.jobs, [&](size_t i) { out[i] = certify_trial(o, i); });
  return out;
}

size_t count_violations(std::span<const GapReport> reports) {
  size_t n = 0;
  for (const auto& r : reports) n += r.verdict == Verdict::kViolation;
  return n;
}

// ---------------------------------------------------------------------------
// Taylor expansion in the first argument

GapSample phi_first_argument_gap(const PsdMatrix& a1, const PsdMatrix& a2, const PsdMatrix& b,
                                 const ExponentPair& exps, double t, const Tolerances& tol) {
  const std::array<PsdMatrix, 2> x0{a1 * t, b};
  const std::array<PsdMatrix, 2> x1{a2 * t, b};
  return midpoint_gap([&](std::span<const PsdMatrix> a) { return phi(a, exps, tol); }, x0, x1);
}

double taylor_gap_prediction(const PsdMatrix& a1, const PsdMatrix& a2, const PsdMatrix& b,
                             const ExponentPair& exps, double t, const Tolerances& tol) {
  const double p = exps.p();
  const double q = exps.q();
  const Matrix weight = matrix_power(b, q - p, tol).matrix();
  const Matrix mid = 0.5 * (a1.matrix() + a2.matrix());
  // All three powers go through the same decomposition path so that A1 = A2
  // gives an exactly zero bracket.
  auto term = [&](const Matrix& a) {
    return (matrix_power(clamp_to_psd(a), p, tol).matrix() * weight).trace().real();
  };
  const double bracket = 0.5 * term(a1.matrix()) + 0.5 * term(a2.matrix()) - term(mid);
  return std::pow(t, p) / p * std::pow(schatten_norm(b, q), 1.0 - q) * bracket;
}

// ---------------------------------------------------------------------------
// Counterexample search

namespace {

struct Witness {
  PsdMatrix b;
  double t = 0.0;
  double gap = 0.0;
  double tol = 0.0;
};

PsdMatrix witness_matrix(const Eigen::VectorXcd& v, const ExponentPair& exps, double eps) {
  const Index n = v.size();
  const Matrix proj = v * v.adjoint();
  if (exps.q() > exps.p()) return clamp_to_psd(proj);
  const PsdMatrix reg = clamp_to_psd(eps * Matrix::Identity(n, n) + proj);
  return matrix_power(reg, -1.0);
}

// Scans t = 1/2, 1/4, ..., 2^-12 and returns the first t whose gap has the
// requested sign with |gap| > margin * gap_tol.
std::optional<Witness> scan_t(const PsdMatrix& a1, const PsdMatrix& a2, const PsdMatrix& b,
                              const ExponentPair& exps, double sign,
                              const CounterexampleBudget& budget, const Tolerances& tol) {
  double t = 0.5;
  for (int k = 1; k <= 12; ++k, t *= 0.5) {
    const GapSample g = phi_first_argument_gap(a1, a2, b, exps, t, tol);
    const double gt = g.tolerance(budget.rel_tol);
    if (sign * g.gap > budget.margin * gt) return Witness{b, t, g.gap, gt};
  }
  return std::nullopt;
}

}  // namespace

Counterexample find_counterexample(const ExponentPair& exps, Index dim, std::uint64_t seed,
                                   const CounterexampleBudget& budget, const Tolerances& tol) {
  if (!(exps.p() > 2.0) || exps.q() == exps.p()) {
    std::ostringstream os;
    os << "counterexample search needs p > 2 and q != p, got p = " << exps.p()
       << ", q = " << exps.q();
    fail(ErrorCode::kBadRegime, os.str());
  }
  if (dim < 2) fail(ErrorCode::kInvalidArgument, "counterexamples need dimension >= 2");

  const bool projector = exps.q() > exps.p();
  const std::array<double, 4> eps_schedule{1e-3, 1e-4, 1e-5, 1e-6};
  Rng rng(seed);
  for (int pair = 0; pair < budget.matrix_pairs; ++pair) {
    const PsdMatrix a1 = wishart(rng, dim);
    const PsdMatrix a2 = wishart(rng, dim);
    const PsdMatrix mid = clamp_to_psd(0.5 * (a1.matrix() + a2.matrix()));
    const Matrix opgap = 0.5 * matrix_power(a1, exps.p(), tol).matrix() +
                         0.5 * matrix_power(a2, exps.p(), tol).matrix() -
                         matrix_power(mid, exps.p(), tol).matrix();
    const SpectralDecomposition sd = eigh(HermitianMatrix::symmetrized(opgap));
    const double lo = sd.eigenvalues(0);
    const double hi = sd.eigenvalues(dim - 1);
    const double scale = std::max(std::abs(lo), std::abs(hi));
    if (!(lo < -1e-9 * scale) || !(hi > 1e-9 * scale)) continue;
    const Eigen::VectorXcd v = sd.eigenvectors.col(0);
    const Eigen::VectorXcd w = sd.eigenvectors.col(dim - 1);

    const size_t n_eps = projector ? 1 : eps_schedule.size();
    for (size_t e = 0; e < n_eps; ++e) {
      const double eps = projector ? 0.0 : eps_schedule[e];
      const auto neg = scan_t(a1, a2, witness_matrix(v, exps, eps), exps, -1.0, budget, tol);
      if (!neg) continue;
      const auto pos = scan_t(a1, a2, witness_matrix(w, exps, eps), exps, +1.0, budget, tol);
      if (!pos) continue;
      Counterexample ce;
      ce.a1 = a1;
      ce.a2 = a2;
      ce.exps = exps;
      ce.v = v;
      ce.w = w;
      ce.b_negative = neg->b;
      ce.b_positive = pos->b;
      ce.epsilon = eps;
      ce.t_negative = neg->t;
      ce.t_positive = pos->t;
      ce.gap_negative = neg->gap;
      ce.gap_positive = pos->gap;
      ce.tol_negative = neg->tol;
      ce.tol_positive = pos->tol;
      ce.pairs_tried = pair + 1;
      return ce;
    }
  }
  std::ostringstream os;
  os << "no counterexample found for p = " << exps.p() << ", q = " << exps.q() << " in "
     << budget.matrix_pairs << " matrix pairs";
  fail(ErrorCode::kSearchExhausted, os.str());
}

// ---------------------------------------------------------------------------
// Bridges to the two-variable trace forms

BridgeGap bekjan_bridge_gap(const PsdMatrix& a1, const PsdMatrix& a2, const PsdMatrix& b1,
                            const PsdMatrix& b2, double p, double t, const Tolerances& tol) {
  const ExponentPair exps(p, 1.0);
  const std::array<PsdMatrix, 2> x0{a1 * t, b1};
  const std::array<PsdMatrix, 2> x1{a2 * t, b2};
  const GapSample g =
      midpoint_gap([&](std::span<const PsdMatrix> a) { return phi(a, exps, tol); }, x0, x1);

  const PsdMatrix amid = clamp_to_psd(0.5 * (a1.matrix() + a2.matrix()));
  const PsdMatrix bmid = clamp_to_psd(0.5 * (b1.matrix() + b2.matrix()));
  auto term = [&](const PsdMatrix& a, const PsdMatrix& b) {
    return (matrix_power(a, p, tol).matrix() * matrix_power(b, 1.0 - p, tol).matrix())
        .trace()
        .real();
  };
  BridgeGap out;
  out.lhs_gap = g.gap;
  out.scale = g.scale();
  out.predicted = std::pow(t, p) / p *
                  (0.5 * term(a1, b1) + 0.5 * term(a2, b2) - term(amid, bmid));
  return out;
}

bool signs_agree(double x, double y, double tol) {
  const int sx = x > tol ? 1 : (x < -tol ? -1 : 0);
  const int sy = y > tol ? 1 : (y < -tol ? -1 : 0);
  return sx * sy >= 0;
}

GapSample ando_lieb_gap(const PsdMatrix& a1, const PsdMatrix& a2, const PsdMatrix& b1,
                        const PsdMatrix& b2, const Matrix& k, double p, double r,
                        const Tolerances& tol) {
  const std::array<PsdMatrix, 2> x0{a1, b1};
  const std::array<PsdMatrix, 2> x1{a2, b2};
  return midpoint_gap(
      [&](std::span<const PsdMatrix> a) {
        return joint_trace_form(a[0], a[1], k, p, 1.0 - r, tol);
      },
      x0, x1);
}

GapSample joint_objective_gap(const PsdMatrix& a1, const PsdMatrix& a2, const PsdMatrix& x1,
                              const PsdMatrix& x2, const Matrix& b, double p, double r,
                              const Tolerances& tol) {
  // Tr(A^{p/2} B X^{1-r} B* A^{p/2}) = Tr(A^p K* X^{1-r} K) with K = B*.
  const Matrix k = b.adjoint();
  const std::array<PsdMatrix, 2> e0{a1, x1};
  const std::array<PsdMatrix, 2> e1{a2, x2};
  return midpoint_gap(
      [&](std::span<const PsdMatrix> a) {
        return joint_trace_form(a[0], a[1], k, p, 1.0 - r, tol);
      },
      e0, e1);
}

}  // namespace tracecvx
