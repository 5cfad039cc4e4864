#ifndef DPPLAB_ESTIMATOR_HPP
#define DPPLAB_ESTIMATOR_HPP

#include <optional>
#include <string>
#include <vector>

#include "dpplab/kernel.hpp"
#include "dpplab/moments.hpp"
#include "dpplab/sampler.hpp"

namespace dpp {

// Per-pair sign resolution record. For pivot-row pairs the sign is forced
// positive and the argument is NaN (no threewise moment is involved).
struct SignRecord {
  int i = 0;
  int j = 0;
  double amplitude = 0.0;
  double sign_argument = 0.0;
  int sign = 0;  // -1, 0, +1
};

struct ClipRecord {
  int i = 0;
  int j = 0;
  double cov_argument = 0.0;  // the negative value that was clipped to 0
};

// The closed-form point estimate. Deliberately not a CorrelationKernel: the
// plug-in estimate need not have eigenvalues inside (0,1). Pivot-row
// off-diagonal entries are nonnegative and the diagonal lies in [0,1].
struct EstimatedKernel {
  Matrix kernel;
  int pivot = 1;
  Regime regime = Regime::strict;
  std::vector<SignRecord> sign_diagnostics;
  std::vector<ClipRecord> clip_events;

  std::string to_json_string() const;
  static EstimatedKernel from_json_string(const std::string& text);
};

// Covariance of vech(K-hat) scaled by T (the delta-method limit), vech taken
// column-major over the lower triangle.
struct AsymptoticCovariance {
  int d = 0;
  Matrix matrix;  // d(d+1)/2 square, symmetric PSD
};

// vech helpers (column-major lower triangle, 1-based matrix indices).
int vech_length(int d);
int vech_index(int i, int j, int d);
Vector vech(const Matrix& M);

// Empirical moments with divisor exactly T, so the plug-in covariance
// identities hold without correction factors.
MomentVector sample_moments(const SampleMatrix& X, int pivot);

// Pivot auto-selection: the row maximizing min_j |Cov-hat(X_i, X_j)|, ties
// to the lowest index.
int auto_pivot(const SampleMatrix& X);

// Strict regime: amplitudes sqrt(K_ii K_jj - P[X_i=X_j=1]), error if the
// argument is negative; signs from the pivot-anchored threewise identity.
EstimatedKernel recover_from_moments(const MomentVector& pi);

// Robust regime: the square-root argument is clipped at 0 first; a zero
// amplitude forces sign 0 and a zero entry. Equal to the strict output
// whenever nothing clips and no sign argument ties at 0.
EstimatedKernel recover_robust(const MomentVector& pi);

EstimatedKernel estimate(const SampleMatrix& X, int pivot, Regime regime);

// The 2^(d-1) conjugates of the point estimate, ordered by pattern mask.
std::vector<Matrix> estimated_identified_set(const EstimatedKernel& est,
                                             int enum_limit = defaults::enum_limit);

// Searches for D with ||D A D - B||_inf <= tol by propagating signs along
// row 1 and verifying all entries. Returns the pattern, or nullopt when no
// pattern fits. Throws when a row-1 product is too close to 0 for the
// propagation to be meaningful at resolution tol.
std::optional<SignPattern> d_similarity_between(const Matrix& A, const Matrix& B, double tol);

// Delta method around the closed-form moment map: J Cov(pi-hat) J^T with the
// moment covariance evaluated under the plug-in kernel recovered from pi_hat
// (entries det K_{A u B} - pi_A pi_B) and J by central finite differences.
// Requires every off-diagonal amplitude above deriv_guard (the square root
// is not differentiable at 0).
AsymptoticCovariance asymptotic_covariance(const MomentVector& pi_hat, long T,
                                           double fd_step = 1e-6, double deriv_guard = 1e-3);

// Spectral clamp of an estimate into a valid kernel (eigenvalues pushed into
// [margin, 1-margin]) for consumers that need to re-simulate.
CorrelationKernel project_to_valid(const Matrix& estimate, double margin = 1e-6);

// Unchecked moment-to-kernel map used by the delta method and the modulus
// probes: no MomentVector invariant validation, strict errors still apply.
Matrix kernel_from_moments_raw(const Vector& values, int d, int pivot, Regime regime);

// Central finite-difference Jacobian of vech(kernel) w.r.t. the moment
// vector, step fd_step relative with a 1e-2 floor per coordinate.
Matrix moment_jacobian(const Vector& values, int d, int pivot, double fd_step = 1e-6);

std::string moments_to_csv(const MomentVector& pi);
MomentVector moments_from_csv(const std::string& text);

}  // namespace dpp

#endif
