#ifndef DPPLAB_CONSTRAINED_HPP
#define DPPLAB_CONSTRAINED_HPP

#include <functional>
#include <string>
#include <vector>

#include "dpplab/estimator.hpp"
#include "dpplab/kernel.hpp"

namespace dpp {

// A parametric kernel family theta -> K(theta). Users register their own by
// filling the struct; two families are built in. start_box bounds the
// quasi-random multi-start proposals (admissibility is still checked per
// proposal). d_closure says whether conjugation keeps K(theta) inside the
// family, which decides case 1 vs case 2 applicability in automatic mode.
struct ParametricFamily {
  std::string name;
  int d = 0;
  int param_dim = 0;
  std::function<Matrix(const Vector&)> map;
  std::function<bool(const Vector&)> admissible;
  Matrix start_box;  // param_dim x 2, columns (lo, hi)
  bool d_closure = false;
};

// K(theta) = sigma^2 (1-rho) I + sigma^2 rho e e', theta = (sigma, rho).
// Admissible iff sigma >= 0 and both eigenvalues sigma^2(1-rho),
// sigma^2(1+(d-1)rho) lie in (0,1); in particular -1/(d-1) < rho < 1.
ParametricFamily family_equicovariance(int d);

// K(theta)_ij = a_|i-j|, theta = (a_0, ..., a_{d-1}). Admissible iff the
// eigenvalues lie in (0,1).
ParametricFamily family_toeplitz(int d);

struct FitOptions {
  int n_restarts = 8;
  int max_iter = 2000;
  double param_tol = 1e-8;
};

struct FitResult {
  Vector theta;
  Matrix k_of_theta;
  double objective = 0.0;
  SignPattern d_hat = SignPattern::identity(1);  // identity pattern in case 1
  int iterations = 0;
  int restarts = 0;
  bool converged = false;

  std::string to_json_string() const;
};

// Step 1 of the two-step moment fit: minimize
// [vech(K_hat)-vech(K(theta))]' Omega [vech(K_hat)-vech(K(theta))] over the
// admissible set by multi-start Nelder-Mead; step 2 is K(theta-hat).
FitResult fit_case1(const Matrix& K_hat, const ParametricFamily& fam, const Matrix& Omega,
                    const FitOptions& opts = {});

// Joint minimization over the 2^(d-1) canonical conjugation patterns and
// theta; the winner is selected by (objective, pattern mask, theta).
FitResult fit_case2(const Matrix& K_hat, const ParametricFamily& fam, const Matrix& Omega,
                    const FitOptions& opts = {}, int enum_limit = defaults::enum_limit);

// All distinct theta with K(theta) = D K(theta0) D for some pattern: each
// conjugate target is fitted exactly; solutions are kept when the objective
// is at most tol and deduplicated at max-norm tolerance tol.
std::vector<Vector> constrained_identified_set(const ParametricFamily& fam, const Vector& theta0,
                                               double tol, const FitOptions& opts = {},
                                               int enum_limit = defaults::enum_limit);

Matrix identity_omega(int d);

}  // namespace dpp

#endif
