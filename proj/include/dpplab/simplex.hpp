#ifndef DPPLAB_SIMPLEX_HPP
#define DPPLAB_SIMPLEX_HPP

#include <functional>

#include "dpplab/kernel.hpp"

namespace dpp {

// Nelder-Mead with standard coefficients. Objectives may return +inf to
// reject points (barrier handling of admissibility constraints).
struct SimplexOptions {
  int max_iter = 2000;
  double param_tol = 1e-8;  // max vertex spread per coordinate
  double f_tol = 1e-14;
};

struct SimplexResult {
  Vector x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

SimplexResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                          const Vector& init_step, const SimplexOptions& opts = {});

}  // namespace dpp

#endif
