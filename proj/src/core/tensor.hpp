#pragma once

// Tensor-product structure on C^{d1} (x) C^{d2} [(x) C^{d3}].
//
// Factors are numbered from 1, leftmost first, and the leftmost factor is the
// most significant in the row/column index. A factor index passed to
// partial_trace names the factor that is traced OUT.

#include <cstdint>
#include <iterator>
#include <vector>

#include "core/matcore.hpp"

namespace tracecvx {

class TensorSpace {
 public:
  TensorSpace() = default;
  explicit TensorSpace(std::vector<Index> factor_dims);

  size_t num_factors() const { return dims_.size(); }
  Index factor_dim(int factor) const;  // 1-based
  const std::vector<Index>& factor_dims() const { return dims_; }
  Index total_dim() const;

  /// The space left after removing `factor`; removing the last factor leaves
  /// the trivial space {1}.
  TensorSpace without(int factor) const;

  bool operator==(const TensorSpace&) const = default;

 private:
  std::vector<Index> dims_;
};

class LabeledMatrix {
 public:
  LabeledMatrix(TensorSpace space, HermitianMatrix matrix);

  const TensorSpace& space() const { return space_; }
  const HermitianMatrix& hermitian() const { return matrix_; }
  const Matrix& matrix() const { return matrix_.matrix(); }
  Index dim() const { return matrix_.dim(); }

  PsdMatrix psd(const Tolerances& tol = {}) const { return PsdMatrix(matrix_, tol); }

 private:
  TensorSpace space_;
  HermitianMatrix matrix_;
};

Matrix kron(const Matrix& a, const Matrix& b);
LabeledMatrix kron(const HermitianMatrix& a, const HermitianMatrix& b);

/// Index-contraction partial trace of a general matrix over `factor`.
Matrix partial_trace(const Matrix& a, const TensorSpace& space, int factor);
LabeledMatrix partial_trace(const LabeledMatrix& a, int factor);

/// Traces out every factor in `factors` (any order), returning the matrix on
/// the remaining factors.
LabeledMatrix partial_trace(const LabeledMatrix& a, std::vector<int> factors);

/// I (x) ... (x) op (x) ... (x) I with op in slot `factor`.
Matrix local_operator(const TensorSpace& space, const Matrix& op, int factor);

/// L* A L with L = local_operator(space, op, factor).
LabeledMatrix embed(const LabeledMatrix& a, const Matrix& op, int factor);

/// Reorders tensor factors: factor k of the result is factor order[k-1] of
/// the input (1-based entries).
Matrix permute_factors(const Matrix& a, const TensorSpace& space,
                       const std::vector<int>& order);
LabeledMatrix permute_factors(const LabeledMatrix& a, const std::vector<int>& order);

/// Signed permutation W e_j = (-1)^{signs[j]} e_{perm[j]} (0-based).
struct SignedPermutation {
  std::vector<int> perm;
  std::vector<int> signs;

  Matrix matrix() const;
};

/// The group of n x n signed permutation matrices, 2^n n! elements, with
/// random access by index. Exhaustive enumeration is capped at n = 4.
class UhlmannGroup {
 public:
  static constexpr int kMaxExhaustive = 4;

  explicit UhlmannGroup(int n);

  int n() const { return n_; }
  size_t size() const { return size_; }
  SignedPermutation element(size_t index) const;

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = SignedPermutation;
    using difference_type = std::ptrdiff_t;
    using pointer = void;
    using reference = SignedPermutation;

    iterator(const UhlmannGroup* g, size_t i) : g_(g), i_(i) {}
    SignedPermutation operator*() const { return g_->element(i_); }
    iterator& operator++() {
      ++i_;
      return *this;
    }
    bool operator==(const iterator& o) const { return i_ == o.i_; }

   private:
    const UhlmannGroup* g_;
    size_t i_;
  };

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, size_}; }

 private:
  int n_;
  size_t size_;
};

/// Exact average of [I (x) W*] A [I (x) W] over the signed permutation group
/// acting on `factor`; equals (1/n) Tr_factor(A) (x) I.
LabeledMatrix uhlmann_average(const LabeledMatrix& a, int factor = 2);

/// Monte-Carlo version for factors of any size. `draws` = 0 selects
/// 10 * 2^n * n! uniform draws. Exploratory use only: the error is
/// O(draws^{-1/2}).
LabeledMatrix sample_uhlmann_average(const LabeledMatrix& a, int factor,
                                     std::uint64_t seed, size_t draws = 0);

}  // namespace tracecvx
