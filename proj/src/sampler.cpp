#include "dpplab/sampler.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>

namespace dpp {

namespace {

constexpr double kClampSlack = 1e-9;

// Removes the component along item `a` from the selected-eigenvector basis
// and re-orthonormalizes, so row squared norms stay exact inclusion
// probabilities of the conditional projection kernel.
void project_out_item(Matrix& W, int k, int a) {
  int piv = 0;
  double best = std::abs(W(a, 0));
  for (int j = 1; j < k; ++j) {
    const double v = std::abs(W(a, j));
    if (v > best) {
      best = v;
      piv = j;
    }
  }
  if (best <= 0.0)
    raise(errc::numerical_singularity, "projection step lost the selected item");
  if (piv != k - 1) W.col(piv).swap(W.col(k - 1));
  const Vector c = W.col(k - 1) / W(a, k - 1);
  for (int j = 0; j < k - 1; ++j) W.col(j) -= W(a, j) * c;
  // modified Gram-Schmidt on the remaining k-1 columns
  for (int j = 0; j < k - 1; ++j) {
    for (int l = 0; l < j; ++l) W.col(j) -= W.col(l).dot(W.col(j)) * W.col(l);
    const double n2 = W.col(j).squaredNorm();
    if (n2 < 1e-24)
      raise(errc::numerical_singularity, "projection basis degenerated");
    W.col(j) /= std::sqrt(n2);
  }
}

}  // namespace

SampleMatrix sample_dpp(const CorrelationKernel& K, long T, SeedSpec seed) {
  if (T < 1) raise(errc::invalid_input, "sample size must be >= 1");
  const int d = K.dim();
  Eigen::SelfAdjointEigenSolver<Matrix> es(K.matrix());
  const Vector lambda = es.eigenvalues();
  const Matrix& V = es.eigenvectors();

  SampleMatrix X;
  X.d = d;
  X.data.assign(static_cast<std::size_t>(T) * d, 0);

  Philox gen(seed);
  Matrix W(d, d);
  std::vector<int> picked_cols(static_cast<std::size_t>(d));
  Vector rownorm(d);

  for (long t = 0; t < T; ++t) {
    // phase 1: pick eigenvectors independently, P[i] = lambda_i
    int k = 0;
    for (int i = 0; i < d; ++i)
      if (gen.next_double() < lambda[i]) picked_cols[static_cast<std::size_t>(k++)] = i;
    if (k == 0) continue;  // empty set drawn
    for (int j = 0; j < k; ++j) W.col(j) = V.col(picked_cols[static_cast<std::size_t>(j)]);

    // phase 2: draw the k items through projection conditionals
    std::uint8_t* row = &X.data[static_cast<std::size_t>(t) * d];
    for (int rem = k; rem >= 1; --rem) {
      double total = 0.0;
      for (int a = 0; a < d; ++a) {
        double p = W.leftCols(rem).row(a).squaredNorm();
        if (p > 1.0) {
          if (p > 1.0 + kClampSlack)
            raise(errc::numerical_singularity, "projection conditional exceeds 1");
          p = 1.0;
          ++X.clamp_events;
        }
        rownorm[a] = p;
        total += p;
      }
      const double u = gen.next_double() * total;
      double cum = 0.0;
      int a = -1;
      for (int i = 0; i < d; ++i) {
        cum += rownorm[i];
        if (u < cum) {
          a = i;
          break;
        }
      }
      if (a < 0) {  // roundoff at the top of the walk: take the last positive mass
        for (int i = d - 1; i >= 0; --i)
          if (rownorm[i] > 0.0) {
            a = i;
            break;
          }
      }
      if (a < 0) raise(errc::numerical_singularity, "projection conditionals vanished");
      row[a] = 1;
      if (rem > 1) project_out_item(W, rem, a);
    }
  }
  return X;
}

SampleMatrix sample_from_exact(const ExactDistribution& dist, long T, SeedSpec seed,
                               int enum_limit) {
  if (T < 1) raise(errc::invalid_input, "sample size must be >= 1");
  if (dist.d > enum_limit)
    raise(errc::refuse_large_d, "table sampler refused at d = " + std::to_string(dist.d));
  if (dist.subsets.size() != dist.probs.size() || dist.probs.empty())
    raise(errc::invalid_input, "malformed distribution table");

  std::vector<double> cum(dist.probs.size());
  std::partial_sum(dist.probs.begin(), dist.probs.end(), cum.begin());
  if (std::abs(cum.back() - 1.0) > 1e-12)
    raise(errc::invalid_input, "distribution table does not sum to 1");

  SampleMatrix X;
  X.d = dist.d;
  X.data.assign(static_cast<std::size_t>(T) * dist.d, 0);
  Philox gen(seed);
  for (long t = 0; t < T; ++t) {
    const double u = gen.next_double();
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const std::size_t idx = std::min<std::size_t>(
        static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
    std::uint8_t* row = &X.data[static_cast<std::size_t>(t) * dist.d];
    for (int i : dist.subsets[idx].members()) row[i - 1] = 1;
  }
  return X;
}

}  // namespace dpp
