#include "dpplab/kernel.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace dpp {

const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_input: return "InvalidInput";
    case errc::io_error: return "IoError";
    case errc::not_symmetric: return "NotSymmetric";
    case errc::spectrum_out_of_range: return "SpectrumOutOfRange";
    case errc::numerical_singularity: return "NumericalSingularity";
    case errc::zero_in_pivot_row: return "ZeroInPivotRow";
    case errc::refuse_large_d: return "RefuseLargeD";
    case errc::empty_sample: return "EmptySample";
    case errc::negative_cov_argument: return "NegativeCovArgument";
    case errc::zero_sign_argument: return "ZeroSignArgument";
    case errc::assumption_violated: return "AssumptionViolated";
    case errc::ambiguous_sign: return "AmbiguousSign";
    case errc::no_admissible_start: return "NoAdmissibleStart";
    case errc::derivative_guard: return "DerivativeGuard";
    case errc::non_positive_eta: return "NonPositiveEta";
    case errc::invalid_eta: return "InvalidEta";
    case errc::non_decaying_bound: return "NonDecayingBound";
    case errc::t_too_small: return "TTooSmall";
  }
  return "UnknownError";
}

// ---------------------------------------------------------------------------
// SubsetIndex

SubsetIndex::SubsetIndex(std::vector<int> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  for (std::size_t k = 0; k < members_.size(); ++k) {
    if (members_[k] < 1) raise(errc::invalid_input, "subset indices are 1-based");
    if (k > 0 && members_[k] == members_[k - 1])
      raise(errc::invalid_input, "duplicate subset index " + std::to_string(members_[k]));
  }
}

SubsetIndex SubsetIndex::from_mask(std::uint32_t mask) {
  std::vector<int> m;
  for (int b = 0; b < 32; ++b)
    if (mask & (1u << b)) m.push_back(b + 1);
  return SubsetIndex(std::move(m));
}

bool SubsetIndex::contains(int i) const {
  return std::binary_search(members_.begin(), members_.end(), i);
}

std::uint32_t SubsetIndex::mask() const {
  std::uint32_t m = 0;
  for (int i : members_) {
    if (i > 32) raise(errc::invalid_input, "subset index beyond mask range");
    m |= 1u << (i - 1);
  }
  return m;
}

bool lex_less(const SubsetIndex& a, const SubsetIndex& b) {
  return std::lexicographical_compare(a.members().begin(), a.members().end(),
                                      b.members().begin(), b.members().end());
}

// ---------------------------------------------------------------------------
// SignPattern

SignPattern::SignPattern(std::vector<int> signs) : signs_(std::move(signs)) {
  if (signs_.empty()) raise(errc::invalid_input, "empty sign pattern");
  for (int s : signs_)
    if (s != 1 && s != -1) raise(errc::invalid_input, "sign entries must be +1 or -1");
}

SignPattern SignPattern::identity(int d) { return SignPattern(std::vector<int>(d, 1)); }

SignPattern SignPattern::from_mask(int d, std::uint32_t mask) {
  std::vector<int> s(static_cast<std::size_t>(d), 1);
  for (int b = 0; b + 1 < d; ++b)
    if (mask & (1u << b)) s[static_cast<std::size_t>(b) + 1] = -1;
  return SignPattern(std::move(s));
}

bool SignPattern::is_identity() const {
  return std::all_of(signs_.begin(), signs_.end(), [](int s) { return s == 1; });
}

SignPattern SignPattern::canonical() const {
  if (signs_[0] == 1) return *this;
  std::vector<int> s(signs_);
  for (int& v : s) v = -v;
  return SignPattern(std::move(s));
}

std::uint32_t SignPattern::mask() const {
  const SignPattern c = canonical();
  std::uint32_t m = 0;
  for (int b = 0; b + 1 < c.dim(); ++b)
    if (c.signs_[static_cast<std::size_t>(b) + 1] == -1) m |= 1u << b;
  return m;
}

// ---------------------------------------------------------------------------
// Validation and conversions

namespace {

Matrix check_square_finite(const Matrix& M) {
  if (M.rows() != M.cols() || M.rows() < 1)
    raise(errc::invalid_input, "matrix must be square and nonempty");
  if (!M.allFinite()) raise(errc::invalid_input, "matrix has non-finite entries");
  return M;
}

Matrix symmetrize_checked(const Matrix& M) {
  check_square_finite(M);
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > defaults::sym_tol * scale) {
    std::ostringstream os;
    os << "asymmetry " << asym << " exceeds " << defaults::sym_tol << " relative";
    raise(errc::not_symmetric, os.str());
  }
  return 0.5 * (M + M.transpose());
}

}  // namespace

CorrelationKernel validate_kernel(const Matrix& M, double eig_tol) {
  const Matrix S = symmetrize_checked(M);
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (!(ev[k] > eig_tol) || !(ev[k] < 1.0 - eig_tol)) {
      std::ostringstream os;
      os << "eigenvalue " << ev[k] << " outside (" << eig_tol << ", " << 1.0 - eig_tol << ")";
      raise(errc::spectrum_out_of_range, os.str());
    }
  }
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    if (!(S(i, i) > 0.0) || !(S(i, i) < 1.0))
      raise(errc::spectrum_out_of_range,
            "diagonal entry " + std::to_string(S(i, i)) + " outside (0,1)");
  }
  return CorrelationKernel(S);
}

LEnsemble validate_l_ensemble(const Matrix& M, double eig_tol) {
  const Matrix S = symmetrize_checked(M);
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues();
  double det = 1.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (!(ev[k] > eig_tol)) {
      std::ostringstream os;
      os << "eigenvalue " << ev[k] << " not positive beyond " << eig_tol;
      raise(errc::spectrum_out_of_range, os.str());
    }
    det *= 1.0 + ev[k];
  }
  return LEnsemble(S, det);
}

LEnsemble k_to_sigma(const CorrelationKernel& K) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(K.matrix());
  const Vector lam = es.eigenvalues();
  Vector mu(lam.size());
  double det = 1.0;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    const double gap = 1.0 - lam[k];
    if (gap <= 1e-14)
      raise(errc::numerical_singularity, "I - K numerically singular (eigenvalue near 1)");
    mu[k] = lam[k] / gap;
    det *= 1.0 + mu[k];
  }
  Matrix S = es.eigenvectors() * mu.asDiagonal() * es.eigenvectors().transpose();
  S = 0.5 * (S + S.transpose());
  return LEnsemble(std::move(S), det);
}

CorrelationKernel sigma_to_k(const LEnsemble& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S.matrix());
  const Vector mu = es.eigenvalues();
  Vector lam(mu.size());
  for (Eigen::Index k = 0; k < mu.size(); ++k) lam[k] = mu[k] / (1.0 + mu[k]);
  Matrix K = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  K = 0.5 * (K + K.transpose());
  return CorrelationKernel(std::move(K));
}

Matrix d_conjugate_matrix(const Matrix& K, const SignPattern& D) {
  if (K.rows() != D.dim() || K.cols() != D.dim())
    raise(errc::invalid_input, "sign pattern dimension does not match the matrix");
  Matrix out(K.rows(), K.cols());
  for (Eigen::Index i = 0; i < K.rows(); ++i)
    for (Eigen::Index j = 0; j < K.cols(); ++j)
      out(i, j) = K(i, j) * D.sign(static_cast<int>(i) + 1) * D.sign(static_cast<int>(j) + 1);
  return out;
}

CorrelationKernel d_conjugate(const CorrelationKernel& K, const SignPattern& D) {
  // Conjugation is a similarity transform, so the spectrum is untouched and
  // the result needs no re-validation.
  return CorrelationKernel(d_conjugate_matrix(K.matrix(), D));
}

std::pair<CorrelationKernel, SignPattern> canonicalize(const CorrelationKernel& K, int pivot,
                                                       double zero_tol) {
  const int d = K.dim();
  if (pivot < 1 || pivot > d) raise(errc::invalid_input, "pivot out of range");
  std::vector<int> signs(static_cast<std::size_t>(d), 1);
  for (int j = 1; j <= d; ++j) {
    if (j == pivot) continue;
    const double v = K(pivot, j);
    if (std::abs(v) <= zero_tol)
      raise(errc::zero_in_pivot_row,
            "entry (" + std::to_string(pivot) + "," + std::to_string(j) + ") is zero");
    signs[static_cast<std::size_t>(j) - 1] = v > 0.0 ? 1 : -1;
  }
  const SignPattern D = SignPattern(std::move(signs)).canonical();
  return {d_conjugate(K, D), D};
}

std::vector<CorrelationKernel> identified_set(const CorrelationKernel& K, int enum_limit) {
  const int d = K.dim();
  if (d > enum_limit)
    raise(errc::refuse_large_d, "identified set has 2^(d-1) elements; d = " + std::to_string(d));
  std::vector<CorrelationKernel> out;
  out.reserve(std::size_t{1} << (d - 1));
  for (std::uint32_t m = 0; m < (1u << (d - 1)); ++m)
    out.push_back(d_conjugate(K, SignPattern::from_mask(d, m)));
  return out;
}

double principal_minor(const Matrix& K, const SubsetIndex& s) {
  if (s.empty()) return 1.0;
  if (s.max_index() > K.rows())
    raise(errc::invalid_input, "subset index exceeds matrix dimension");
  const int n = s.size();
  if (n == 1) return K(s.members()[0] - 1, s.members()[0] - 1);
  Matrix sub(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) sub(a, b) = K(s.members()[a] - 1, s.members()[b] - 1);
  return Eigen::PartialPivLU<Matrix>(sub).determinant();
}

}  // namespace dpp
