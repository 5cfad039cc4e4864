#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "dpplab/bounds.hpp"
#include "dpplab/estimator.hpp"
#include "dpplab/exact.hpp"
#include "dpplab/sampler.hpp"
#include "test_util.hpp"

using namespace dpp;
using dpptest::equicov_matrix;

namespace {

MomentVector running_moments() {
  return exact_moment_vector(validate_kernel(equicov_matrix(3, 0.5, 0.2)));
}

}  // namespace

TEST_CASE("rho is the conjugation-minimized max distance") {
  Philox gen(61, 0);
  const CorrelationKernel K = dpptest::random_nonzero_kernel(4, gen);
  const SignPattern D({1, -1, 1, -1});
  CHECK(rho(K.matrix(), d_conjugate_matrix(K.matrix(), D)).value == 0.0);

  Matrix bumped = K.matrix();
  bumped(2, 2) += 0.05;  // the diagonal is invariant under conjugation
  CHECK(rho(K.matrix(), bumped).value == doctest::Approx(0.05).epsilon(1e-12));

  // conjugating either argument leaves the distance unchanged
  Matrix other = dpptest::random_nonzero_kernel(4, gen).matrix();
  const double base = rho(K.matrix(), other).value;
  for (std::uint32_t m = 0; m < 8; ++m) {
    const SignPattern P = SignPattern::from_mask(4, m);
    CHECK(rho(d_conjugate_matrix(K.matrix(), P), other).value ==
          doctest::Approx(base).epsilon(1e-12));
  }

  // domination by the plain max distance on simulated estimates
  const CorrelationKernel Kw =
      validate_kernel(d_conjugate_matrix(equicov_matrix(4, 0.5, 0.15),
                                         SignPattern({1, -1, 1, -1})));
  const Matrix Kstar = canonicalize(Kw).first.matrix();
  for (int rep = 0; rep < 5; ++rep) {
    const EstimatedKernel est = estimate(
        sample_dpp(Kw, 5000, {62, static_cast<std::uint64_t>(rep)}), 1, Regime::strict);
    CHECK(rho(Kw.matrix(), est.kernel).value <=
          (Kstar - est.kernel).cwiseAbs().maxCoeff() + 1e-15);
  }

  CHECK_THROWS_AS(rho(K.matrix(), Matrix::Identity(3, 3)), Error);
}

TEST_CASE("certified modulus: construction, monotonicity and out-of-sample check") {
  const MomentVector pi0 = running_moments();
  const EtaCertificate c1 = eta_modulus(pi0, 0.05);
  CHECK(c1.eta > 0.0);
  CHECK(c1.max_deviation <= 0.05);
  CHECK(c1.lipschitz_linf == doctest::Approx(5.0).epsilon(1e-6));

  const EtaCertificate c2 = eta_modulus(pi0, 0.1);
  CHECK(c2.eta >= c1.eta);  // monotone in epsilon
  CHECK(c2.max_deviation <= 0.1);

  // fresh probes at the certified radius stay within epsilon
  CHECK(eta_probe_max_deviation(pi0, c2.eta, 10000, 0xFEEDu) <= 0.1);

  const EtaCertificate c3 = eta_modulus(pi0, 0.05, EtaMethod::bisection);
  CHECK(c3.eta > 0.0);
  CHECK(c3.max_deviation <= 0.05);
  CHECK(std::isnan(c3.lipschitz_linf));

  // tiny amplitudes trip the differentiability guard
  const MomentVector small =
      exact_moment_vector(validate_kernel(equicov_matrix(3, 0.5, 1e-4)));
  CHECK_THROWS_AS(eta_modulus(small, 0.05), Error);
}

TEST_CASE("large-deviation bound: conventions and shape") {
  const MomentVector pi0 = running_moments();
  const double eta = 0.0025;

  const BoundValue b1 = ld_bound({pi0, 0.1, eta, 1000});
  const BoundValue b2 = ld_bound({pi0, 0.1, eta, 2000});
  const BoundValue b3 = ld_bound({pi0, 0.1, eta, 10000});
  CHECK(b1.raw > b2.raw);
  CHECK(b2.raw > b3.raw);
  CHECK(b1.clamped <= 1.0);
  CHECK(b1.clamped >= 0.0);

  // degenerate coordinates contribute nothing
  Vector v(3);
  v << 0.5, 0.0, 0.0;  // marginal 0.5, marginal 0, pair 0
  const MomentVector deg(2, 1, v);
  const auto coefs = ld_exponent_coefficients(deg, eta);
  CHECK(std::isnan(coefs[1]));
  CHECK(std::isnan(coefs[2]));
  const BoundValue bd = ld_bound({deg, 0.1, eta, 1000});
  CHECK(bd.raw == doctest::Approx(2.0 * std::exp(-coefs[0] * 1000.0)).epsilon(1e-12));

  CHECK_THROWS_AS(ld_bound({pi0, 0.1, 0.0, 1000}), Error);
  CHECK_THROWS_AS(ld_bound({pi0, 0.1, 1.5, 1000}), Error);
}

TEST_CASE("hoeffding bound arithmetic") {
  const MomentVector pi0 = running_moments();
  const BoundValue h = hoeffding_bound({pi0, 0.1, 0.1, 1000});
  CHECK(h.raw == doctest::Approx(2.0 * 7.0 * std::exp(-20.0)).epsilon(1e-12));
  CHECK(hoeffding_bound({pi0, 0.1, 0.1, 2000}).raw < h.raw);
}

TEST_CASE("sharpness ordering holds under its precondition") {
  const MomentVector pi0 = running_moments();
  const double eta = 0.0025;
  const auto coefs = ld_exponent_coefficients(pi0, eta);
  for (Eigen::Index h = 0; h < pi0.values().size(); ++h) {
    const double p = pi0.values()[h];
    CHECK(eta <= std::min(p, 1.0 - p));
    CHECK(coefs[static_cast<std::size_t>(h)] >= eta * eta);
  }
  for (long T : {1000L, 10000L}) {
    CHECK(ld_bound({pi0, 0.1, eta, T}).raw <= hoeffding_bound({pi0, 0.1, eta, T}).raw);
  }
}

TEST_CASE("the comparison exponent is the two-sided chernoff coefficient") {
  const MomentVector pi0 = running_moments();
  const double eta = 0.0025;
  const auto dflt = ld_exponent_coefficients(pi0, eta, LdExponent::kl_eta);
  const auto cher = ld_exponent_coefficients(pi0, eta, LdExponent::kl_two_sided);
  for (std::size_t h = 0; h < dflt.size(); ++h) {
    const double p = pi0.values()[static_cast<Eigen::Index>(h)];
    const double up = (p + eta) * std::log((p + eta) / p) +
                      (1 - p - eta) * std::log((1 - p - eta) / (1 - p));
    const double dn = (p - eta) * std::log((p - eta) / p) +
                      (1 - p + eta) * std::log((1 - p + eta) / (1 - p));
    CHECK(cher[h] == doctest::Approx(std::min(up, dn)).epsilon(1e-10));
    CHECK(dflt[h] > cher[h]);  // the default coefficient is far larger here
  }
}

TEST_CASE("sample complexity inverts the monotone tails") {
  const MomentVector pi0 = running_moments();
  const double eta = 0.0025;
  CHECK(sample_complexity(pi0, eta, 1.0, BoundKind::ld) == 1);
  CHECK(sample_complexity(pi0, eta, 1.0, BoundKind::hoeffding) == 1);

  const long t_ld = sample_complexity(pi0, eta, 0.05, BoundKind::ld);
  const long t_hf = sample_complexity(pi0, eta, 0.05, BoundKind::hoeffding);
  CHECK(t_ld <= t_hf);
  CHECK(ld_bound({pi0, 0.1, eta, t_ld}).clamped <= 0.05);
  CHECK(ld_bound({pi0, 0.1, eta, t_ld - 1}).clamped > 0.05);

  // halving delta grows T* by at most ceil(ln 2 / c_min)
  const auto coefs = ld_exponent_coefficients(pi0, eta);
  double cmin = 1e300;
  for (double c : coefs)
    if (!std::isnan(c)) cmin = std::min(cmin, c);
  const long t_half = sample_complexity(pi0, eta, 0.025, BoundKind::ld);
  CHECK(t_half - t_ld <= static_cast<long>(std::ceil(std::log(2.0) / cmin)));

  // a coefficient at zero never decays
  Vector v(3);
  v << 0.1, 0.5, 0.05;
  const MomentVector flat(2, 1, v);
  try {
    sample_complexity(flat, 0.1, 0.05, BoundKind::ld);  // eta equals a coordinate
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::non_decaying_bound);
  }
}

TEST_CASE("iterated-logarithm radius") {
  const double T = std::exp(std::exp(1.0));
  CHECK(lil_radius(0.5, T) ==
        doctest::Approx(0.5 * std::sqrt(2.0) / std::exp(std::exp(1.0) / 2.0)).epsilon(1e-12));
  CHECK(lil_radius(0.0, 100.0) == 0.0);
  CHECK(lil_radius(1.0, 100.0) == 0.0);
  try {
    lil_radius(0.5, 2.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::t_too_small);
  }

  // envelope check: Bernoulli(0.21) sample means stay within 1.5x the radius
  const double p = 0.21;
  const long T2 = 100000;
  const double radius = lil_radius(p, static_cast<double>(T2));
  const std::uint64_t thresh =
      static_cast<std::uint64_t>(p * 18446744073709551616.0);  // p * 2^64
  int inside = 0;
  const int reps = 1000;
  for (int r = 0; r < reps; ++r) {
    Philox gen(63, static_cast<std::uint64_t>(r));
    long hits = 0;
    for (long t = 0; t < T2; ++t)
      if (gen.next_u64() < thresh) ++hits;
    const double dev = std::abs(static_cast<double>(hits) / T2 - p);
    if (dev <= 1.5 * radius) ++inside;
  }
  CHECK(inside >= 990);
}
