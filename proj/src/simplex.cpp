#include "dpplab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace dpp {

SimplexResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                          const Vector& init_step, const SimplexOptions& opts) {
  const int n = static_cast<int>(x0.size());
  const double alpha = 1.0, gamma = 2.0, beta = 0.5, delta = 0.5;

  std::vector<Vector> xs(static_cast<std::size_t>(n) + 1, x0);
  std::vector<double> fs(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i) + 1][i] += init_step[i];
  for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = f(xs[i]);

  std::vector<int> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  auto sort_simplex = [&] {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return fs[static_cast<std::size_t>(a)] < fs[static_cast<std::size_t>(b)];
    });
  };

  SimplexResult res;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    sort_simplex();
    const int best = order.front(), worst = order.back();
    const int second_worst = order[order.size() - 2];

    double spread = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
      spread = std::max(spread,
                        (xs[static_cast<std::size_t>(order[i])] -
                         xs[static_cast<std::size_t>(best)]).cwiseAbs().maxCoeff());
    const double fspread = std::isfinite(fs[static_cast<std::size_t>(worst)])
                               ? fs[static_cast<std::size_t>(worst)] -
                                     fs[static_cast<std::size_t>(best)]
                               : std::numeric_limits<double>::infinity();
    if (spread <= opts.param_tol &&
        (fspread <= opts.f_tol * (1.0 + std::abs(fs[static_cast<std::size_t>(best)])))) {
      res.converged = true;
      break;
    }

    // centroid of all but the worst vertex
    Vector c = Vector::Zero(n);
    for (int i : order)
      if (i != worst) c += xs[static_cast<std::size_t>(i)];
    c /= static_cast<double>(n);

    const Vector xr = c + alpha * (c - xs[static_cast<std::size_t>(worst)]);
    const double fr = f(xr);
    if (fr < fs[static_cast<std::size_t>(best)]) {
      const Vector xe = c + gamma * (xr - c);
      const double fe = f(xe);
      if (fe < fr) {
        xs[static_cast<std::size_t>(worst)] = xe;
        fs[static_cast<std::size_t>(worst)] = fe;
      } else {
        xs[static_cast<std::size_t>(worst)] = xr;
        fs[static_cast<std::size_t>(worst)] = fr;
      }
    } else if (fr < fs[static_cast<std::size_t>(second_worst)]) {
      xs[static_cast<std::size_t>(worst)] = xr;
      fs[static_cast<std::size_t>(worst)] = fr;
    } else {
      const bool outside = fr < fs[static_cast<std::size_t>(worst)];
      const Vector xc =
          outside ? c + beta * (xr - c) : c + beta * (xs[static_cast<std::size_t>(worst)] - c);
      const double fc = f(xc);
      if (fc < (outside ? fr : fs[static_cast<std::size_t>(worst)])) {
        xs[static_cast<std::size_t>(worst)] = xc;
        fs[static_cast<std::size_t>(worst)] = fc;
      } else {
        // shrink toward the best vertex
        for (int i : order) {
          if (i == best) continue;
          xs[static_cast<std::size_t>(i)] =
              xs[static_cast<std::size_t>(best)] +
              delta * (xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(best)]);
          fs[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
        }
      }
    }
  }
  sort_simplex();
  res.x = xs[static_cast<std::size_t>(order.front())];
  res.f = fs[static_cast<std::size_t>(order.front())];
  res.iterations = it;
  return res;
}

}  // namespace dpp
