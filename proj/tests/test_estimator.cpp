#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Eigenvalues>
#include <cmath>

#include "doctest.h"
#include "dpplab/estimator.hpp"
#include "dpplab/exact.hpp"
#include "dpplab/sampler.hpp"
#include "test_util.hpp"

using namespace dpp;
using dpptest::equicov_matrix;

namespace {

SampleMatrix from_rows(std::vector<std::vector<int>> rows) {
  SampleMatrix X;
  X.d = static_cast<int>(rows.front().size());
  for (const auto& r : rows)
    for (int v : r) X.data.push_back(static_cast<std::uint8_t>(v));
  return X;
}

Matrix kernel_zero24() {
  Matrix M = equicov_matrix(4, 0.5, 0.15);
  M(1, 3) = M(3, 1) = 0.0;
  return M;
}

}  // namespace

TEST_CASE("sample moments of a single row") {
  const SampleMatrix X = from_rows({{1, 0, 1, 0}});
  const MomentVector pi = sample_moments(X, 1);
  CHECK(pi.marginal(1) == 1.0);
  CHECK(pi.marginal(2) == 0.0);
  CHECK(pi.marginal(3) == 1.0);
  CHECK(pi.marginal(4) == 0.0);
  CHECK(pi.pair(1, 3) == 1.0);
  CHECK(pi.pair(1, 2) == 0.0);
  CHECK(pi.pair(2, 4) == 0.0);
  CHECK(pi.triple(3, 4) == 0.0);
  CHECK(pi.triple(2, 3) == 0.0);
}

TEST_CASE("histogram and direct moment paths agree") {
  // d = 21 exceeds the histogram cutoff; cross-check against brute force
  Philox gen(41, 0);
  SampleMatrix X;
  X.d = 21;
  const long T = 64;
  for (long t = 0; t < T * X.d; ++t)
    X.data.push_back(static_cast<std::uint8_t>(gen.next_u64() & 1));
  const MomentVector pi = sample_moments(X, 2);
  for (int i = 1; i <= X.d; ++i) {
    double s = 0.0;
    for (long t = 0; t < T; ++t) s += X.at(t, i);
    CHECK(pi.marginal(i) == doctest::Approx(s / T).epsilon(1e-15));
  }
  double s23 = 0.0, s2_5_9 = 0.0;
  for (long t = 0; t < T; ++t) {
    s23 += X.at(t, 2) * X.at(t, 3);
    s2_5_9 += X.at(t, 2) * X.at(t, 5) * X.at(t, 9);
  }
  CHECK(pi.pair(2, 3) == doctest::Approx(s23 / T).epsilon(1e-15));
  CHECK(pi.triple(5, 9) == doctest::Approx(s2_5_9 / T).epsilon(1e-15));
}

TEST_CASE("sample moments track exact moments at Monte Carlo scale") {
  // equicovariance truth sigma^2 = 0.4, rho = 0.4
  const CorrelationKernel K = validate_kernel(equicov_matrix(4, 0.4, 0.16));
  const long T = 100000;
  const MomentVector hat = sample_moments(sample_dpp(K, T, {40, 0}), 1);
  const MomentVector ex = exact_moment_vector(K, 1);
  for (Eigen::Index h = 0; h < ex.values().size(); ++h) {
    const double p = ex.values()[h];
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(T));
    CHECK(std::abs(hat.values()[h] - p) < 5.0 * se);
  }
}

TEST_CASE("exact-moment recovery returns the canonical representative") {
  Philox gen(42, 0);
  for (int d = 3; d <= 8; ++d) {
    for (int rep = 0; rep < 3; ++rep) {
      const CorrelationKernel K = dpptest::random_nonzero_kernel(d, gen);
      const Matrix Kstar = canonicalize(K).first.matrix();
      const EstimatedKernel est = recover_from_moments(exact_moment_vector(K));
      CHECK((est.kernel - Kstar).cwiseAbs().maxCoeff() < 1e-10);

      // sign-flipped input lands on the same representative
      const std::uint32_t mask = static_cast<std::uint32_t>(gen.next_u64()) &
                                 ((1u << (d - 1)) - 1u);
      const CorrelationKernel Kc = d_conjugate(K, SignPattern::from_mask(d, mask));
      const EstimatedKernel est2 = recover_from_moments(exact_moment_vector(Kc));
      CHECK((est2.kernel - Kstar).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("recovery diagnostics carry amplitudes, sign arguments and signs") {
  const CorrelationKernel K = validate_kernel(equicov_matrix(3, 0.5, 0.2));
  const CorrelationKernel Kc = d_conjugate(K, SignPattern({1, -1, 1}));
  const EstimatedKernel est = recover_from_moments(exact_moment_vector(Kc));
  CHECK((est.kernel - K.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE(est.sign_diagnostics.size() == 3);
  for (const auto& r : est.sign_diagnostics) {
    CHECK(r.sign == 1);
    CHECK(r.amplitude == doctest::Approx(0.2).epsilon(1e-10));
    const bool pivot_pair = r.i == 1;
    CHECK(std::isnan(r.sign_argument) == pivot_pair);
  }
}

TEST_CASE("strict regime boundary behavior") {
  // an exactly independent pair has amplitude zero without error
  Vector v(3);
  v << 0.5, 0.5, 0.25;
  const EstimatedKernel est = recover_from_moments(MomentVector(2, 1, v));
  CHECK(est.kernel(0, 1) == 0.0);

  // a negative covariance argument is an error in strict, a clip in robust
  Vector w(3);
  w << 0.5, 0.5, 0.26;
  try {
    recover_from_moments(MomentVector(2, 1, w));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::negative_cov_argument);
  }
  const EstimatedKernel rob = recover_robust(MomentVector(2, 1, w));
  CHECK(rob.kernel(0, 1) == 0.0);
  REQUIRE(rob.clip_events.size() == 1);
  CHECK(rob.clip_events[0].i == 1);
  CHECK(rob.clip_events[0].j == 2);
  CHECK(rob.clip_events[0].cov_argument == doctest::Approx(-0.01).epsilon(1e-12));
}

TEST_CASE("an exact sign-argument tie errors in strict and zeroes in robust") {
  // d=3, pivot 1: dyadic moments make every recovery operation exact, so the
  // threewise moment below produces a sign argument of exactly 0
  Vector v(7);
  const double m = 0.5;
  const double p12 = 0.25 - 0.0625, p13 = 0.25 - 0.0625, p23 = 0.25 - 0.015625;
  const double a23sq = m * m - p23, a12sq = m * m - p12, a13sq = m * m - p13;
  const double t = m * m * m - m * a23sq - m * a13sq - m * a12sq;  // zero argument
  v << m, m, m, p12, p13, p23, t;
  try {
    recover_from_moments(MomentVector(3, 1, v));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::zero_sign_argument);
  }
  const EstimatedKernel rob = recover_robust(MomentVector(3, 1, v));
  CHECK(rob.kernel(1, 2) == 0.0);
  REQUIRE(rob.sign_diagnostics.size() == 3);
  CHECK(rob.sign_diagnostics[2].sign == 0);
  CHECK(rob.sign_diagnostics[2].amplitude == doctest::Approx(std::sqrt(a23sq)));
}

TEST_CASE("robust recovery equals strict when nothing clips") {
  const CorrelationKernel K = validate_kernel(
      d_conjugate_matrix(equicov_matrix(4, 0.5, 0.15), SignPattern({1, -1, 1, -1})));
  const SampleMatrix X = sample_dpp(K, 20000, {43, 1});
  const EstimatedKernel s = estimate(X, 1, Regime::strict);
  const EstimatedKernel r = estimate(X, 1, Regime::robust);
  CHECK(r.clip_events.empty());
  CHECK((s.kernel - r.kernel).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("robust recovery reproduces a true zero exactly from exact moments") {
  const CorrelationKernel K = validate_kernel(kernel_zero24());
  const EstimatedKernel est = recover_robust(exact_moment_vector(K));
  CHECK(est.kernel(1, 3) == 0.0);
  CHECK((est.kernel - K.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("estimate from simulated draws approaches the canonical truth") {
  const CorrelationKernel K =
      validate_kernel(d_conjugate_matrix(equicov_matrix(4, 0.5, 0.15), SignPattern({1, -1, 1, -1})));
  const Matrix Kstar = canonicalize(K).first.matrix();
  const EstimatedKernel est = estimate(sample_dpp(K, 100000, {44, 0}), 1, Regime::strict);
  CHECK((est.kernel - Kstar).cwiseAbs().maxCoeff() < 0.02);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      CHECK(std::signbit(est.kernel(i, j)) == std::signbit(Kstar(i, j)));
}

TEST_CASE("estimates from two pivots differ by a sign conjugation") {
  const CorrelationKernel K =
      validate_kernel(d_conjugate_matrix(equicov_matrix(4, 0.5, 0.15), SignPattern({1, -1, 1, -1})));
  const SampleMatrix X = sample_dpp(K, 10000, {45, 0});
  const EstimatedKernel e1 = estimate(X, 1, Regime::strict);
  const EstimatedKernel e2 = estimate(X, 2, Regime::strict);
  const auto D = d_similarity_between(e1.kernel, e2.kernel, 10.0 / std::sqrt(10000.0));
  REQUIRE(D.has_value());
  CHECK((d_conjugate_matrix(e1.kernel, *D) - e2.kernel).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("d_similarity_between") {
  Philox gen(46, 0);
  const Matrix A = dpptest::random_nonzero_kernel(4, gen).matrix();
  const SignPattern D({1, -1, -1, 1});
  const Matrix B = d_conjugate_matrix(A, D);
  const auto got = d_similarity_between(A, B, 1e-9);
  REQUIRE(got.has_value());
  CHECK(*got == D);

  Matrix Bp = A;
  Bp(2, 3) += 1e-8;
  Bp(3, 2) += 1e-8;
  CHECK(!d_similarity_between(A, Bp, 1e-9).has_value());

  Matrix Az = A;
  Az(0, 1) = Az(1, 0) = 0.0;
  try {
    d_similarity_between(Az, B, 1e-3);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::ambiguous_sign);
  }
}

TEST_CASE("estimated identified set enumerates conjugates of the estimate") {
  const CorrelationKernel K = validate_kernel(equicov_matrix(3, 0.5, 0.2));
  const EstimatedKernel est = estimate(sample_dpp(K, 5000, {47, 0}), 1, Regime::strict);
  const auto set = estimated_identified_set(est);
  REQUIRE(set.size() == 4);
  CHECK((set[0] - est.kernel).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(estimated_identified_set(est, 2), Error);
}

TEST_CASE("pivot auto-selection maximizes the weakest covariance") {
  // row 2 is the only row with all covariances bounded away from zero
  Matrix M = 0.5 * Matrix::Identity(4, 4);
  for (int j = 0; j < 4; ++j)
    if (j != 1) M(1, j) = M(j, 1) = 0.15;
  const CorrelationKernel K = validate_kernel(M);
  const SampleMatrix X = sample_dpp(K, 50000, {48, 0});
  CHECK(auto_pivot(X) == 2);
}

TEST_CASE("delta-method covariance") {
  const CorrelationKernel K = validate_kernel(equicov_matrix(3, 0.5, 0.2));
  const MomentVector pi0 = exact_moment_vector(K);
  const long T = 100000;
  const AsymptoticCovariance cov = asymptotic_covariance(pi0, T);
  REQUIRE(cov.matrix.rows() == 6);

  // marginal block equals the Bernoulli variance K_ii (1 - K_ii)
  for (int i = 1; i <= 3; ++i) {
    const int v = vech_index(i, i, 3);
    CHECK(std::abs(cov.matrix(v, v) - 0.25) / 0.25 < 0.02);
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(cov.matrix);
  CHECK(es.eigenvalues().minCoeff() > -1e-8);

  // the square-root kink is guarded
  Matrix tiny = equicov_matrix(3, 0.5, 1e-4);
  try {
    asymptotic_covariance(exact_moment_vector(validate_kernel(tiny)), T);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::derivative_guard);
  }
}

TEST_CASE("projection to a valid kernel clamps the spectrum") {
  Matrix bad = equicov_matrix(3, 0.52, 0.5);  // largest eigenvalue 1.52
  const CorrelationKernel K = project_to_valid(bad);
  Eigen::SelfAdjointEigenSolver<Matrix> es(K.matrix());
  CHECK(es.eigenvalues().maxCoeff() <= 1.0 - 1e-7);
  CHECK(es.eigenvalues().minCoeff() >= 1e-7);

  const Matrix good = equicov_matrix(3, 0.5, 0.2);
  CHECK((project_to_valid(good).matrix() - good).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("input validation") {
  SampleMatrix empty;
  empty.d = 3;
  CHECK_THROWS_AS(sample_moments(empty, 1), Error);

  Vector v(3);
  v << 0.5, 0.5, 0.6;  // pair above both marginals
  CHECK_THROWS_AS(MomentVector(3 - 1, 1, v), Error);

  const SampleMatrix X = from_rows({{1, 0}, {0, 1}});
  CHECK_THROWS_AS(sample_moments(X, 5), Error);
}

TEST_CASE("serialization round trips") {
  const CorrelationKernel K = validate_kernel(kernel_zero24());
  const MomentVector pi = exact_moment_vector(K, 2);
  const MomentVector back = moments_from_csv(moments_to_csv(pi));
  CHECK(back.pivot() == 2);
  CHECK((back.values() - pi.values()).cwiseAbs().maxCoeff() == 0.0);

  // d = 2 has no triple rows; the pivot defaults to 1 on read
  Matrix K2(2, 2);
  K2 << 0.5, 0.25, 0.25, 0.5;
  const MomentVector pi_d2 = exact_moment_vector(validate_kernel(K2));
  const MomentVector back_d2 = moments_from_csv(moments_to_csv(pi_d2));
  CHECK(back_d2.pivot() == 1);
  CHECK((back_d2.values() - pi_d2.values()).cwiseAbs().maxCoeff() == 0.0);

  EstimatedKernel est = recover_robust(pi);
  est.clip_events.push_back({2, 4, -1e-9});
  const EstimatedKernel back2 = EstimatedKernel::from_json_string(est.to_json_string());
  CHECK((back2.kernel - est.kernel).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back2.regime == Regime::robust);
  REQUIRE(back2.clip_events.size() == 1);
  CHECK(back2.clip_events[0].cov_argument == -1e-9);
  REQUIRE(back2.sign_diagnostics.size() == est.sign_diagnostics.size());
  CHECK(std::isnan(back2.sign_diagnostics[0].sign_argument) ==
        std::isnan(est.sign_diagnostics[0].sign_argument));
}
