#include "dpplab/constrained.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "dpplab/simplex.hpp"
#include "json.hpp"

namespace dpp {

Matrix identity_omega(int d) { return Matrix::Identity(vech_length(d), vech_length(d)); }

ParametricFamily family_equicovariance(int d) {
  if (d < 3) raise(errc::invalid_input, "equicovariance family needs d >= 3");
  ParametricFamily fam;
  fam.name = "equicovariance";
  fam.d = d;
  fam.param_dim = 2;
  fam.map = [d](const Vector& th) {
    const double s2 = th[0] * th[0], rho = th[1];
    Matrix K = Matrix::Constant(d, d, s2 * rho);
    K.diagonal().setConstant(s2);
    return K;
  };
  fam.admissible = [d](const Vector& th) {
    if (th.size() != 2) return false;
    const double sigma = th[0], rho = th[1];
    if (!(sigma >= 0.0)) return false;
    const double s2 = sigma * sigma;
    const double lo = s2 * (1.0 - rho);               // multiplicity d-1
    const double hi = s2 * (1.0 + (d - 1.0) * rho);   // multiplicity 1
    return lo > 0.0 && lo < 1.0 && hi > 0.0 && hi < 1.0;
  };
  fam.start_box = Matrix(2, 2);
  fam.start_box << 0.05, 0.95, -1.0 / (d - 1.0) + 1e-3, 1.0 - 1e-3;
  fam.d_closure = false;  // sign flips leave the family once rho != 0
  return fam;
}

ParametricFamily family_toeplitz(int d) {
  if (d < 2) raise(errc::invalid_input, "toeplitz family needs d >= 2");
  ParametricFamily fam;
  fam.name = "toeplitz";
  fam.d = d;
  fam.param_dim = d;
  fam.map = [d](const Vector& a) {
    Matrix K(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) K(i, j) = a[std::abs(i - j)];
    return K;
  };
  fam.admissible = [d, map = fam.map](const Vector& a) {
    if (a.size() != d) return false;
    Eigen::SelfAdjointEigenSolver<Matrix> es(map(a), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    return lo > 0.0 && hi < 1.0;
  };
  fam.start_box = Matrix(d, 2);
  fam.start_box.col(0).setConstant(-0.45);
  fam.start_box.col(1).setConstant(0.45);
  fam.start_box(0, 0) = 0.05;
  fam.start_box(0, 1) = 0.95;
  fam.d_closure = false;
  return fam;
}

namespace {

// Halton low-discrepancy point in [0,1)^k for index n >= 1.
double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

constexpr int kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

std::vector<Vector> admissible_starts(const ParametricFamily& fam, int n_restarts) {
  if (static_cast<std::size_t>(fam.param_dim) > std::size(kHaltonBases))
    raise(errc::invalid_input, "family parameter dimension too large for start generation");
  std::vector<Vector> starts;
  const int budget = 128 * n_restarts;
  for (int n = 1; n <= budget && static_cast<int>(starts.size()) < n_restarts; ++n) {
    Vector th(fam.param_dim);
    for (int k = 0; k < fam.param_dim; ++k) {
      const double u = halton(n, kHaltonBases[k]);
      th[k] = fam.start_box(k, 0) + u * (fam.start_box(k, 1) - fam.start_box(k, 0));
    }
    if (fam.admissible(th)) starts.push_back(std::move(th));
  }
  if (starts.empty()) raise(errc::no_admissible_start, "no admissible start found for " + fam.name);
  return starts;
}

bool lex_less_vec(const Vector& a, const Vector& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return true;
    if (a[k] > b[k]) return false;
  }
  return false;
}

FitResult fit_target(const Matrix& target, const ParametricFamily& fam, const Matrix& Omega,
                     const FitOptions& opts) {
  const Vector vt = vech(target);
  auto objective = [&](const Vector& th) {
    if (!fam.admissible(th)) return std::numeric_limits<double>::infinity();
    const Vector r = vt - vech(fam.map(th));
    return static_cast<double>(r.dot(Omega * r));
  };

  SimplexOptions sopts;
  sopts.max_iter = opts.max_iter;
  sopts.param_tol = opts.param_tol;

  FitResult best;
  best.objective = std::numeric_limits<double>::infinity();
  const auto starts = admissible_starts(fam, opts.n_restarts);
  for (const auto& x0 : starts) {
    Vector step(fam.param_dim);
    for (int k = 0; k < fam.param_dim; ++k)
      step[k] = 0.05 * (fam.start_box(k, 1) - fam.start_box(k, 0));
    SimplexResult r = nelder_mead(objective, x0, step, sopts);
    // one polish pass from the incumbent tightens the last digits
    SimplexResult r2 = nelder_mead(objective, r.x, 0.1 * step, sopts);
    if (r2.f < r.f || (r2.f == r.f && lex_less_vec(r2.x, r.x))) r = r2;
    ++best.restarts;
    best.iterations += r.iterations;
    if (r.f < best.objective ||
        (r.f == best.objective && (best.theta.size() == 0 || lex_less_vec(r.x, best.theta)))) {
      best.objective = r.f;
      best.theta = r.x;
      best.converged = r.converged;
    }
  }
  best.k_of_theta = fam.map(best.theta);
  best.d_hat = SignPattern::identity(fam.d);
  return best;
}

}  // namespace

FitResult fit_case1(const Matrix& K_hat, const ParametricFamily& fam, const Matrix& Omega,
                    const FitOptions& opts) {
  if (K_hat.rows() != fam.d || K_hat.cols() != fam.d)
    raise(errc::invalid_input, "estimate dimension does not match the family");
  if (Omega.rows() != vech_length(fam.d) || Omega.cols() != vech_length(fam.d))
    raise(errc::invalid_input, "weight matrix must be d(d+1)/2 square");
  return fit_target(K_hat, fam, Omega, opts);
}

FitResult fit_case2(const Matrix& K_hat, const ParametricFamily& fam, const Matrix& Omega,
                    const FitOptions& opts, int enum_limit) {
  if (fam.d > enum_limit)
    raise(errc::refuse_large_d, "case-2 pattern sweep refused at d = " + std::to_string(fam.d));
  FitResult best;
  best.objective = std::numeric_limits<double>::infinity();
  bool have = false;
  for (std::uint32_t m = 0; m < (1u << (fam.d - 1)); ++m) {
    const SignPattern D = SignPattern::from_mask(fam.d, m);
    FitResult r = fit_case1(d_conjugate_matrix(K_hat, D), fam, Omega, opts);
    r.d_hat = D;
    // ties keep the earlier pattern (masks are swept in lexicographic order)
    if (!have || r.objective < best.objective) {
      const int iters = best.iterations + r.iterations;
      const int restarts = best.restarts + r.restarts;
      best = std::move(r);
      best.iterations = iters;
      best.restarts = restarts;
      have = true;
    } else {
      best.iterations += r.iterations;
      best.restarts += r.restarts;
    }
  }
  return best;
}

std::vector<Vector> constrained_identified_set(const ParametricFamily& fam, const Vector& theta0,
                                               double tol, const FitOptions& opts,
                                               int enum_limit) {
  if (fam.d > enum_limit)
    raise(errc::refuse_large_d, "identified-set sweep refused at d = " + std::to_string(fam.d));
  if (!fam.admissible(theta0)) raise(errc::invalid_input, "theta0 is not admissible");
  const Matrix K0 = fam.map(theta0);
  const Matrix Omega = identity_omega(fam.d);
  std::vector<Vector> out;
  for (std::uint32_t m = 0; m < (1u << (fam.d - 1)); ++m) {
    const SignPattern D = SignPattern::from_mask(fam.d, m);
    const FitResult r = fit_target(d_conjugate_matrix(K0, D), fam, Omega, opts);
    if (r.objective > tol) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Vector& t) {
      return (t - r.theta).cwiseAbs().maxCoeff() <= tol;
    });
    if (!dup) out.push_back(r.theta);
  }
  return out;
}

std::string FitResult::to_json_string() const {
  nlohmann::json j;
  j["theta"] = std::vector<double>(theta.data(), theta.data() + theta.size());
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(k_of_theta.rows()));
  for (Eigen::Index i = 0; i < k_of_theta.rows(); ++i)
    for (Eigen::Index c = 0; c < k_of_theta.cols(); ++c) rows[i].push_back(k_of_theta(i, c));
  j["k_of_theta"] = rows;
  j["objective"] = objective;
  j["d_hat"] = d_hat.signs();
  j["iterations"] = iterations;
  j["restarts"] = restarts;
  j["converged"] = converged;
  return j.dump(2);
}

}  // namespace dpp
