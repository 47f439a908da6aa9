#include "core/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

namespace tracecvx {

TensorSpace::TensorSpace(std::vector<Index> factor_dims) : dims_(std::move(factor_dims)) {
  if (dims_.empty() || dims_.size() > 3) {
    fail(ErrorCode::kInvalidArgument, "a tensor space has 1 to 3 factors");
  }
  for (Index d : dims_) {
    if (d <= 0) fail(ErrorCode::kInvalidArgument, "factor dimensions must be positive");
  }
}

Index TensorSpace::factor_dim(int factor) const {
  if (factor < 1 || static_cast<size_t>(factor) > dims_.size()) {
    std::ostringstream os;
    os << "factor index " << factor << " out of range 1.." << dims_.size();
    fail(ErrorCode::kBadFactorIndex, os.str());
  }
  return dims_[static_cast<size_t>(factor - 1)];
}

Index TensorSpace::total_dim() const {
  return std::accumulate(dims_.begin(), dims_.end(), Index{1}, std::multiplies<>());
}

TensorSpace TensorSpace::without(int factor) const {
  factor_dim(factor);
  std::vector<Index> rest;
  for (size_t k = 0; k < dims_.size(); ++k) {
    if (static_cast<int>(k) + 1 != factor) rest.push_back(dims_[k]);
  }
  if (rest.empty()) rest.push_back(1);
  return TensorSpace(std::move(rest));
}

LabeledMatrix::LabeledMatrix(TensorSpace space, HermitianMatrix matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  if (space_.total_dim() != matrix_.dim()) {
    std::ostringstream os;
    os << "tensor space of total dimension " << space_.total_dim()
       << " attached to a " << matrix_.dim() << "-dimensional matrix";
    fail(ErrorCode::kDimMismatch, os.str());
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

LabeledMatrix kron(const HermitianMatrix& a, const HermitianMatrix& b) {
  return {TensorSpace({a.dim(), b.dim()}),
          HermitianMatrix::symmetrized(kron(a.matrix(), b.matrix()))};
}

namespace {

struct Split {
  Index left;
  Index mid;
  Index right;
};

Split split_at(const TensorSpace& space, int factor) {
  Split s{1, space.factor_dim(factor), 1};
  const auto& d = space.factor_dims();
  for (int k = 1; k < factor; ++k) s.left *= d[static_cast<size_t>(k - 1)];
  for (size_t k = static_cast<size_t>(factor); k < d.size(); ++k) s.right *= d[k];
  return s;
}

}  // namespace

Matrix partial_trace(const Matrix& a, const TensorSpace& space, int factor) {
  if (a.rows() != space.total_dim() || a.cols() != space.total_dim()) {
    fail(ErrorCode::kDimMismatch, "matrix does not match its tensor space");
  }
  const Split s = split_at(space, factor);
  const Index n = s.left * s.right;
  Matrix out = Matrix::Zero(n, n);
  for (Index l = 0; l < s.left; ++l) {
    for (Index r = 0; r < s.right; ++r) {
      const Index row = l * s.right + r;
      for (Index l2 = 0; l2 < s.left; ++l2) {
        for (Index r2 = 0; r2 < s.right; ++r2) {
          const Index col = l2 * s.right + r2;
          Complex acc = 0.0;
          for (Index m = 0; m < s.mid; ++m) {
            acc += a((l * s.mid + m) * s.right + r, (l2 * s.mid + m) * s.right + r2);
          }
          out(row, col) = acc;
        }
      }
    }
  }
  return out;
}

LabeledMatrix partial_trace(const LabeledMatrix& a, int factor) {
  return {a.space().without(factor),
          HermitianMatrix::symmetrized(partial_trace(a.matrix(), a.space(), factor))};
}

LabeledMatrix partial_trace(const LabeledMatrix& a, std::vector<int> factors) {
  // Trace from the highest index down so the remaining indices stay valid.
  std::sort(factors.begin(), factors.end(), std::greater<>());
  if (std::adjacent_find(factors.begin(), factors.end()) != factors.end()) {
    fail(ErrorCode::kBadFactorIndex, "factor listed twice in partial trace");
  }
  LabeledMatrix cur = a;
  for (int f : factors) cur = partial_trace(cur, f);
  return cur;
}

Matrix local_operator(const TensorSpace& space, const Matrix& op, int factor) {
  const Split s = split_at(space, factor);
  if (op.rows() != s.mid || op.cols() != s.mid) {
    std::ostringstream os;
    os << "operator of size " << op.rows() << "x" << op.cols()
       << " does not fit factor " << factor << " of dimension " << s.mid;
    fail(ErrorCode::kDimMismatch, os.str());
  }
  return kron(kron(Matrix::Identity(s.left, s.left), op), Matrix::Identity(s.right, s.right));
}

LabeledMatrix embed(const LabeledMatrix& a, const Matrix& op, int factor) {
  const Matrix l = local_operator(a.space(), op, factor);
  return {a.space(), HermitianMatrix::symmetrized(l.adjoint() * a.matrix() * l)};
}

Matrix permute_factors(const Matrix& a, const TensorSpace& space,
                       const std::vector<int>& order) {
  const auto& d = space.factor_dims();
  const size_t k = d.size();
  if (order.size() != k) fail(ErrorCode::kBadFactorIndex, "permutation has wrong length");
  std::vector<int> seen(k, 0);
  for (int o : order) {
    if (o < 1 || static_cast<size_t>(o) > k || seen[static_cast<size_t>(o - 1)]++) {
      fail(ErrorCode::kBadFactorIndex, "invalid factor permutation");
    }
  }
  // new_index[i] = old index of the basis vector at new position i.
  const Index n = space.total_dim();
  std::vector<Index> map(static_cast<size_t>(n));
  std::vector<Index> digits(k);
  for (Index old = 0; old < n; ++old) {
    Index rem = old;
    for (size_t f = k; f-- > 0;) {
      digits[f] = rem % d[f];
      rem /= d[f];
    }
    Index neu = 0;
    for (size_t f = 0; f < k; ++f) {
      const size_t src = static_cast<size_t>(order[f] - 1);
      neu = neu * d[src] + digits[src];
    }
    map[static_cast<size_t>(neu)] = old;
  }
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      out(i, j) = a(map[static_cast<size_t>(i)], map[static_cast<size_t>(j)]);
    }
  }
  return out;
}

LabeledMatrix permute_factors(const LabeledMatrix& a, const std::vector<int>& order) {
  std::vector<Index> dims;
  for (int o : order) dims.push_back(a.space().factor_dim(o));
  return {TensorSpace(std::move(dims)),
          HermitianMatrix::symmetrized(permute_factors(a.matrix(), a.space(), order))};
}

// ---------------------------------------------------------------------------
// Signed permutation group

Matrix SignedPermutation::matrix() const {
  const Index n = static_cast<Index>(perm.size());
  Matrix w = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    w(perm[static_cast<size_t>(j)], j) = signs[static_cast<size_t>(j)] ? -1.0 : 1.0;
  }
  return w;
}

namespace {

size_t factorial(int n) {
  size_t f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<size_t>(k);
  return f;
}

// Lehmer-code decoding of a permutation rank.
std::vector<int> permutation_from_rank(int n, size_t rank) {
  std::vector<int> pool(static_cast<size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> out;
  out.reserve(static_cast<size_t>(n));
  for (int k = n; k >= 1; --k) {
    const size_t f = factorial(k - 1);
    const size_t idx = rank / f;
    rank %= f;
    out.push_back(pool[idx]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  return out;
}

}  // namespace

UhlmannGroup::UhlmannGroup(int n) : n_(n) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "group order parameter must be positive");
  if (n > kMaxExhaustive) {
    std::ostringstream os;
    os << "signed permutation group for n = " << n
       << " is too large to enumerate (limit " << kMaxExhaustive << ")";
    fail(ErrorCode::kGroupTooLarge, os.str());
  }
  size_ = (size_t{1} << n) * factorial(n);
}

SignedPermutation UhlmannGroup::element(size_t index) const {
  const size_t nsigns = size_t{1} << n_;
  const size_t mask = index % nsigns;
  SignedPermutation w;
  w.perm = permutation_from_rank(n_, index / nsigns);
  w.signs.resize(static_cast<size_t>(n_));
  for (int j = 0; j < n_; ++j) w.signs[static_cast<size_t>(j)] = (mask >> j) & 1u;
  return w;
}

LabeledMatrix uhlmann_average(const LabeledMatrix& a, int factor) {
  const Index n = a.space().factor_dim(factor);
  if (n > UhlmannGroup::kMaxExhaustive) {
    fail(ErrorCode::kGroupTooLarge,
         "exact group average needs the traced factor to have dimension <= 4");
  }
  const UhlmannGroup group(static_cast<int>(n));
  Matrix sum = Matrix::Zero(a.dim(), a.dim());
  for (const SignedPermutation& w : group) {
    const Matrix l = local_operator(a.space(), w.matrix(), factor);
    sum += l.adjoint() * a.matrix() * l;
  }
  sum /= static_cast<double>(group.size());
  return {a.space(), HermitianMatrix::symmetrized(sum)};
}

LabeledMatrix sample_uhlmann_average(const LabeledMatrix& a, int factor,
                                     std::uint64_t seed, size_t draws) {
  const int n = static_cast<int>(a.space().factor_dim(factor));
  if (draws == 0) draws = 10 * (size_t{1} << n) * factorial(n);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  SignedPermutation w;
  w.perm.resize(static_cast<size_t>(n));
  w.signs.resize(static_cast<size_t>(n));
  Matrix sum = Matrix::Zero(a.dim(), a.dim());
  for (size_t t = 0; t < draws; ++t) {
    std::iota(w.perm.begin(), w.perm.end(), 0);
    std::shuffle(w.perm.begin(), w.perm.end(), rng);
    for (auto& s : w.signs) s = coin(rng) ? 1 : 0;
    const Matrix l = local_operator(a.space(), w.matrix(), factor);
    sum += l.adjoint() * a.matrix() * l;
  }
  sum /= static_cast<double>(draws);
  return {a.space(), HermitianMatrix::symmetrized(sum)};
}

}  // namespace tracecvx
