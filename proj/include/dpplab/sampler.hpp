#ifndef DPPLAB_SAMPLER_HPP
#define DPPLAB_SAMPLER_HPP

#include <cstdint>
#include <vector>

#include "dpplab/exact.hpp"
#include "dpplab/kernel.hpp"
#include "dpplab/rng.hpp"

namespace dpp {

// T i.i.d. binary observation rows. Row-major, one byte per entry.
struct SampleMatrix {
  int d = 0;
  std::vector<std::uint8_t> data;
  // Conditional probabilities nudged back into [0,1] during sampling
  // (roundoff at near-projection kernels); counted for diagnostics.
  long clamp_events = 0;

  long rows() const { return d == 0 ? 0 : static_cast<long>(data.size()) / d; }
  std::uint8_t at(long t, int i) const {  // i is 1-based
    return data[static_cast<std::size_t>(t) * d + (i - 1)];
  }
};

// Exact sampler by the spectral method: eigendecompose K once, then per draw
// select each eigenvector independently with probability its eigenvalue and
// sample items through projection-kernel conditionals. Deterministic given
// (K, T, seed); draws are consumed from the philox4x32-10 stream in row order.
SampleMatrix sample_dpp(const CorrelationKernel& K, long T, SeedSpec seed);

// Inverse-CDF sampler over an enumerated pmf table; the cross-check for
// sample_dpp at small d.
SampleMatrix sample_from_exact(const ExactDistribution& dist, long T, SeedSpec seed,
                               int enum_limit = defaults::enum_limit);

}  // namespace dpp

#endif
