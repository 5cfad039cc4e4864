#ifndef DPPLAB_KERNEL_HPP
#define DPPLAB_KERNEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "dpplab/errors.hpp"

namespace dpp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Library-wide numeric defaults. Indices are 1-based in every public
// interface (ground set {1,...,d}), matching the file formats.
struct defaults {
  static constexpr double eig_tol = 1e-10;   // spectrum-in-(0,1) margin
  static constexpr double sym_tol = 1e-9;    // relative symmetry slack on ingest
  static constexpr double zero_tol = 1e-12;  // "nonzero entry" test for exact kernels
  static constexpr int enum_limit = 20;      // cap on 2^d / 2^(d-1) enumerations
};

// Sorted subset of {1,...,d}. The empty set is allowed.
class SubsetIndex {
 public:
  SubsetIndex() = default;
  explicit SubsetIndex(std::vector<int> members);
  // Bit b of `mask` set means index b+1 is a member.
  static SubsetIndex from_mask(std::uint32_t mask);

  const std::vector<int>& members() const { return members_; }
  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  bool contains(int i) const;
  int max_index() const { return members_.empty() ? 0 : members_.back(); }
  std::uint32_t mask() const;

  friend bool operator==(const SubsetIndex& a, const SubsetIndex& b) {
    return a.members_ == b.members_;
  }

 private:
  std::vector<int> members_;
};

// Lexicographic order on the member sequences (the file-format order).
bool lex_less(const SubsetIndex& a, const SubsetIndex& b);

// Diagonal +/-1 conjugation pattern. Canonical form fixes the first sign to
// +1 since D and -D induce the same conjugation.
class SignPattern {
 public:
  explicit SignPattern(std::vector<int> signs);
  static SignPattern identity(int d);
  // Canonical pattern for `mask` in [0, 2^(d-1)): bit b set flips index b+2.
  static SignPattern from_mask(int d, std::uint32_t mask);

  int dim() const { return static_cast<int>(signs_.size()); }
  int sign(int i) const { return signs_[static_cast<std::size_t>(i - 1)]; }  // 1-based
  const std::vector<int>& signs() const { return signs_; }
  bool is_identity() const;
  SignPattern canonical() const;  // flips all signs if sign(1) == -1
  std::uint32_t mask() const;     // inverse of from_mask on canonical patterns

  friend bool operator==(const SignPattern& a, const SignPattern& b) {
    return a.signs_ == b.signs_;
  }

 private:
  std::vector<int> signs_;
};

// Symmetric d x d matrix with all eigenvalues strictly inside (0,1).
// Immutable once constructed; obtain instances through validate_kernel or the
// conversion/conjugation operations, which preserve the invariant.
class CorrelationKernel {
 public:
  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i - 1, j - 1); }  // 1-based

  friend CorrelationKernel validate_kernel(const Matrix&, double);
  friend CorrelationKernel d_conjugate(const CorrelationKernel&, const SignPattern&);
  friend CorrelationKernel sigma_to_k(const class LEnsemble&);
  friend CorrelationKernel project_to_valid(const Matrix&, double);

 private:
  explicit CorrelationKernel(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

// Symmetric positive-definite d x d matrix. det(I + Sigma), the pmf
// normalizer, is computed once at construction.
class LEnsemble {
 public:
  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double det_i_plus_sigma() const { return det_i_plus_sigma_; }

  friend LEnsemble validate_l_ensemble(const Matrix&, double);
  friend LEnsemble k_to_sigma(const CorrelationKernel&);

 private:
  LEnsemble(Matrix m, double det) : m_(std::move(m)), det_i_plus_sigma_(det) {}
  Matrix m_;
  double det_i_plus_sigma_;
};

// Validation entry points. Inputs are symmetrized by (M + M^T)/2 after the
// symmetry check; eigenvalues are then required inside the open interval.
CorrelationKernel validate_kernel(const Matrix& M, double eig_tol = defaults::eig_tol);
LEnsemble validate_l_ensemble(const Matrix& M, double eig_tol = defaults::eig_tol);

// Sigma = K (I - K)^(-1) and K = Sigma (I + Sigma)^(-1); mutually inverse.
LEnsemble k_to_sigma(const CorrelationKernel& K);
CorrelationKernel sigma_to_k(const LEnsemble& S);

// Entrywise K'_ij = K_ij * sign_i * sign_j. Preserves all principal minors.
CorrelationKernel d_conjugate(const CorrelationKernel& K, const SignPattern& D);
Matrix d_conjugate_matrix(const Matrix& K, const SignPattern& D);

// Conjugates K so that row `pivot` becomes entrywise positive off the
// diagonal; returns the conjugated kernel and the canonical pattern used.
// Requires every off-diagonal pivot-row entry nonzero (beyond zero_tol).
std::pair<CorrelationKernel, SignPattern> canonicalize(const CorrelationKernel& K,
                                                       int pivot = 1,
                                                       double zero_tol = defaults::zero_tol);

// The full D-orbit of K: 2^(d-1) conjugates over canonical patterns, ordered
// by pattern mask. Element 0 is K itself.
std::vector<CorrelationKernel> identified_set(const CorrelationKernel& K,
                                              int enum_limit = defaults::enum_limit);

// det of the principal submatrix on rows/columns s, by LU with partial
// pivoting. det of the empty subset is 1 by convention.
double principal_minor(const Matrix& K, const SubsetIndex& s);

}  // namespace dpp

#endif
