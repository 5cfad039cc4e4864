#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "doctest.h"
#include "dpplab/estimator.hpp"
#include "dpplab/exact.hpp"
#include "dpplab/sampler.hpp"
#include "test_util.hpp"

using namespace dpp;
using dpptest::equicov_matrix;

namespace {

double column_mean(const SampleMatrix& X, int i) {
  double s = 0.0;
  for (long t = 0; t < X.rows(); ++t) s += X.at(t, i);
  return s / static_cast<double>(X.rows());
}

double pair_freq(const SampleMatrix& X, int i, int j) {
  double s = 0.0;
  for (long t = 0; t < X.rows(); ++t) s += X.at(t, i) * X.at(t, j);
  return s / static_cast<double>(X.rows());
}

double se(double p, long T) { return std::sqrt(p * (1.0 - p) / static_cast<double>(T)); }

}  // namespace

TEST_CASE("philox known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(Philox::block(A4{0, 0, 0, 0}, A2{0, 0}) ==
        A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox::block(A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                      A2{0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox::block(A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      A2{0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("sampling is reproducible and stream-keyed") {
  const CorrelationKernel K = validate_kernel(equicov_matrix(3, 0.5, 0.2));
  const SampleMatrix a = sample_dpp(K, 5000, {7, 3});
  const SampleMatrix b = sample_dpp(K, 5000, {7, 3});
  CHECK(a.data == b.data);
  const SampleMatrix c = sample_dpp(K, 5000, {7, 4});
  CHECK(a.data != c.data);
  const SampleMatrix e = sample_dpp(K, 5000, {8, 3});
  CHECK(a.data != e.data);
}

TEST_CASE("independent case matches the Bernoulli marginal") {
  const CorrelationKernel K = validate_kernel(0.5 * Matrix::Identity(2, 2));
  const long T = 100000;
  const SampleMatrix X = sample_dpp(K, T, {1, 0});
  CHECK(std::abs(column_mean(X, 1) - 0.5) < 4.0 * se(0.5, T));
  CHECK(std::abs(column_mean(X, 2) - 0.5) < 4.0 * se(0.5, T));
  CHECK(X.clamp_events == 0);
}

TEST_CASE("pairwise inclusion matches det K_s") {
  Matrix Km(2, 2);
  Km << 0.5, 0.25, 0.25, 0.5;
  const CorrelationKernel K = validate_kernel(Km);
  const long T = 200000;
  const SampleMatrix X = sample_dpp(K, T, {2, 0});
  CHECK(std::abs(pair_freq(X, 1, 2) - 0.1875) < 4.0 * se(0.1875, T));
}

TEST_CASE("marginal law across a random kernel") {
  Philox gen(31, 0);
  const CorrelationKernel K = dpptest::random_kernel(5, gen);
  const long T = 100000;
  const SampleMatrix X = sample_dpp(K, T, {3, 0});
  for (int i = 1; i <= 5; ++i)
    CHECK(std::abs(column_mean(X, i) - K(i, i)) < 5.0 * se(K(i, i), T));
}

TEST_CASE("chi-square goodness of fit against the enumerated pmf") {
  const CorrelationKernel K = validate_kernel(equicov_matrix(4, 0.5, 0.15));
  const ExactDistribution dist = enumerate_distribution(K);
  const long T = 100000;
  const SampleMatrix X = sample_dpp(K, T, {4, 0});

  std::vector<long> counts(16, 0);
  for (long t = 0; t < T; ++t) {
    std::uint32_t m = 0;
    for (int i = 0; i < 4; ++i) m |= static_cast<std::uint32_t>(X.data[t * 4 + i]) << i;
    ++counts[m];
  }
  double stat = 0.0;
  for (std::size_t k = 0; k < dist.subsets.size(); ++k) {
    const double expected = static_cast<double>(T) * dist.probs[k];
    const double got = static_cast<double>(counts[dist.subsets[k].mask()]);
    stat += (got - expected) * (got - expected) / expected;
  }
  const boost::math::chi_squared chi2(15);
  const double pvalue = boost::math::cdf(boost::math::complement(chi2, stat));
  CHECK(pvalue > 1e-3);
}

TEST_CASE("table sampler matches its table and the spectral sampler downstream") {
  // point mass: a table concentrated on one subset
  ExactDistribution point;
  point.d = 3;
  point.subsets = {SubsetIndex{}, SubsetIndex({1, 3}), SubsetIndex({2})};
  point.probs = {0.0, 1.0, 0.0};
  const SampleMatrix P = sample_from_exact(point, 50, {5, 0});
  for (long t = 0; t < 50; ++t) {
    CHECK(P.at(t, 1) == 1);
    CHECK(P.at(t, 2) == 0);
    CHECK(P.at(t, 3) == 1);
  }

  const CorrelationKernel U = validate_kernel(0.5 * Matrix::Identity(2, 2));
  const long T = 40000;
  const SampleMatrix X = sample_from_exact(enumerate_distribution(U), T, {6, 0});
  std::vector<long> counts(4, 0);
  for (long t = 0; t < T; ++t)
    ++counts[static_cast<std::size_t>(X.at(t, 1) + 2 * X.at(t, 2))];
  for (long c : counts)
    CHECK(std::abs(static_cast<double>(c) / T - 0.25) < 4.0 * se(0.25, T));

  // two-sampler consistency at the level of the estimator
  const CorrelationKernel K = validate_kernel(equicov_matrix(4, 0.5, 0.15));
  const long T2 = 100000;
  const EstimatedKernel e1 = estimate(sample_dpp(K, T2, {7, 0}), 1, Regime::strict);
  const EstimatedKernel e2 =
      estimate(sample_from_exact(enumerate_distribution(K), T2, {7, 1}), 1, Regime::strict);
  CHECK((e1.kernel - e2.kernel).cwiseAbs().maxCoeff() < 0.02);
  CHECK((e1.kernel - K.matrix()).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("sampler input validation") {
  const CorrelationKernel K = validate_kernel(equicov_matrix(3, 0.5, 0.2));
  CHECK_THROWS_AS(sample_dpp(K, 0, {1, 0}), Error);
  ExactDistribution dist = enumerate_distribution(K);
  dist.probs[0] += 0.5;
  CHECK_THROWS_AS(sample_from_exact(dist, 10, {1, 0}), Error);
}
