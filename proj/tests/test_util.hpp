#ifndef DPPLAB_TEST_UTIL_HPP
#define DPPLAB_TEST_UTIL_HPP

#include <Eigen/Dense>
#include <cmath>

#include "dpplab/kernel.hpp"
#include "dpplab/rng.hpp"

namespace dpptest {

inline double gaussian(dpp::Philox& gen) {
  const double u1 = 1.0 - gen.next_double();
  const double u2 = gen.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Random kernel with eigenvalues uniform in (lo, hi): Q from the QR of a
// Gaussian matrix, K = Q diag Q'.
inline dpp::Matrix random_kernel_matrix(int d, dpp::Philox& gen, double lo = 0.2,
                                        double hi = 0.8) {
  dpp::Matrix G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = gaussian(gen);
  const dpp::Matrix Q = Eigen::HouseholderQR<dpp::Matrix>(G).householderQ();
  dpp::Vector ev(d);
  for (int i = 0; i < d; ++i) ev[i] = lo + (hi - lo) * gen.next_double();
  dpp::Matrix K = Q * ev.asDiagonal() * Q.transpose();
  return 0.5 * (K + K.transpose());
}

inline dpp::CorrelationKernel random_kernel(int d, dpp::Philox& gen) {
  return dpp::validate_kernel(random_kernel_matrix(d, gen));
}

// Resamples until every off-diagonal entry clears `floor` in magnitude.
inline dpp::CorrelationKernel random_nonzero_kernel(int d, dpp::Philox& gen,
                                                    double floor = 1e-3) {
  for (;;) {
    const dpp::Matrix K = random_kernel_matrix(d, gen);
    double lo = 1.0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) lo = std::min(lo, std::abs(K(i, j)));
    if (lo >= floor) return dpp::validate_kernel(K);
  }
}

inline dpp::Matrix equicov_matrix(int d, double diag, double off) {
  dpp::Matrix K = dpp::Matrix::Constant(d, d, off);
  K.diagonal().setConstant(diag);
  return K;
}

}  // namespace dpptest

#endif
