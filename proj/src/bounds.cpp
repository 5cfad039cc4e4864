#include "dpplab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpplab/rng.hpp"

namespace dpp {

RhoDistance rho(const Matrix& K, const Matrix& Kp, int enum_limit) {
  if (K.rows() != Kp.rows() || K.cols() != Kp.cols() || K.rows() != K.cols())
    raise(errc::invalid_input, "dimension mismatch");
  const int d = static_cast<int>(K.rows());
  if (d > enum_limit)
    raise(errc::refuse_large_d, "pattern sweep refused at d = " + std::to_string(d));
  RhoDistance out;
  out.value = std::numeric_limits<double>::infinity();
  for (std::uint32_t m = 0; m < (1u << (d - 1)); ++m) {
    const SignPattern D = SignPattern::from_mask(d, m);
    const double v = (d_conjugate_matrix(K, D) - Kp).cwiseAbs().maxCoeff();
    if (v < out.value) {
      out.value = v;
      out.argmin = D;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Modulus of continuity

namespace {

// Probe directions on the surface of the unit max-norm cube. When all 2^m
// sign corners fit in the probe budget they are enumerated first: the
// recovered-kernel map is coordinatewise monotone between sign flips, so the
// binding perturbations sit at corners. Otherwise half the budget goes to
// random corners. Remaining probes are seeded random points rescaled onto
// the cube surface.
std::vector<Vector> probe_directions(int m, int probes, std::uint64_t seed) {
  std::vector<Vector> dirs;
  dirs.reserve(static_cast<std::size_t>(probes));
  const bool all_corners = m <= 20 && (std::int64_t{1} << m) <= probes;
  const int n_corners = all_corners ? static_cast<int>(std::int64_t{1} << m) : probes / 2;
  for (int p = 0; p < n_corners; ++p) {
    Vector v(m);
    if (all_corners) {
      for (int h = 0; h < m; ++h) v[h] = (p >> h) & 1 ? 1.0 : -1.0;
    } else {
      Philox gen(seed, static_cast<std::uint64_t>(p));
      for (int h = 0; h < m; ++h) v[h] = gen.next_u64() & 1 ? 1.0 : -1.0;
    }
    dirs.push_back(std::move(v));
  }
  for (int p = n_corners; p < probes; ++p) {
    Philox gen(seed, static_cast<std::uint64_t>(p));
    Vector v(m);
    for (int h = 0; h < m; ++h) v[h] = 2.0 * gen.next_double() - 1.0;
    const double mx = v.cwiseAbs().maxCoeff();
    if (mx > 0.0) v /= mx;  // push onto the cube surface
    dirs.push_back(std::move(v));
  }
  return dirs;
}

double max_probe_deviation(const MomentVector& pi0, const Vector& base_vech, double eta,
                           const std::vector<Vector>& dirs) {
  double maxdev = 0.0;
  for (const auto& dir : dirs) {
    const Vector pert = pi0.values() + eta * dir;
    double dev;
    try {
      const Matrix K = kernel_from_moments_raw(pert, pi0.dim(), pi0.pivot(), Regime::strict);
      dev = (vech(K) - base_vech).cwiseAbs().maxCoeff();
    } catch (const Error&) {
      dev = std::numeric_limits<double>::infinity();
    }
    maxdev = std::max(maxdev, dev);
  }
  return maxdev;
}

}  // namespace

EtaCertificate eta_modulus(const MomentVector& pi0, double epsilon, EtaMethod method, int probes,
                           std::uint64_t seed, double deriv_guard) {
  if (!(epsilon > 0.0)) raise(errc::invalid_input, "epsilon must be positive");
  const int d = pi0.dim();
  const Matrix K0 = kernel_from_moments_raw(pi0.values(), d, pi0.pivot(), Regime::strict);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (std::abs(K0(i, j)) <= deriv_guard)
        raise(errc::derivative_guard,
              "amplitude at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                  ") is below the differentiability guard");
  const Vector base = vech(K0);
  const int m = static_cast<int>(pi0.values().size());
  const auto dirs = probe_directions(m, probes, seed);

  EtaCertificate cert;
  cert.epsilon = epsilon;
  cert.method = method;
  cert.probes = probes;
  cert.lipschitz_linf = std::numeric_limits<double>::quiet_NaN();

  auto passes = [&](double eta) { return max_probe_deviation(pi0, base, eta, dirs) <= epsilon; };

  double eta = 0.0;
  if (method == EtaMethod::lipschitz) {
    const Matrix J = moment_jacobian(pi0.values(), d, pi0.pivot());
    cert.lipschitz_linf = J.cwiseAbs().rowwise().sum().maxCoeff();
    eta = std::min(epsilon / cert.lipschitz_linf, 0.999);
    while (eta > 1e-12 && !passes(eta)) eta /= 2.0;
    if (eta <= 1e-12) raise(errc::non_positive_eta, "verification collapsed eta below 1e-12");
  } else {
    double hi = 0.999;
    while (hi > 1e-12 && !passes(hi)) hi /= 2.0;
    if (hi <= 1e-12) raise(errc::non_positive_eta, "bisection collapsed eta below 1e-12");
    double lo = hi;
    hi = std::min(2.0 * lo, 0.999);
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (passes(mid))
        lo = mid;
      else
        hi = mid;
    }
    eta = lo;
  }
  cert.eta = eta;
  cert.max_deviation = max_probe_deviation(pi0, base, eta, dirs);
  return cert;
}

double eta_probe_max_deviation(const MomentVector& pi0, double eta, int probes,
                               std::uint64_t seed) {
  const Matrix K0 =
      kernel_from_moments_raw(pi0.values(), pi0.dim(), pi0.pivot(), Regime::strict);
  const Vector base = vech(K0);
  const int m = static_cast<int>(pi0.values().size());
  return max_probe_deviation(pi0, base, eta, probe_directions(m, probes, seed));
}

// ---------------------------------------------------------------------------
// Tail bounds

namespace {

double kl_bernoulli(double a, double p) {
  double v = 0.0;
  if (a > 0.0) v += a * std::log(a / p);
  if (a < 1.0) v += (1.0 - a) * std::log((1.0 - a) / (1.0 - p));
  return v;
}

void check_eta(double eta) {
  if (!(eta > 0.0) || !(eta < 1.0))
    raise(errc::invalid_eta, "eta must lie in (0,1), got " + std::to_string(eta));
}

}  // namespace

std::vector<double> ld_exponent_coefficients(const MomentVector& pi0, double eta,
                                             LdExponent mode) {
  check_eta(eta);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(pi0.values().size()));
  for (Eigen::Index h = 0; h < pi0.values().size(); ++h) {
    const double p = pi0.values()[h];
    if (p == 0.0 || p == 1.0) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());  // contributes nothing
      continue;
    }
    if (mode == LdExponent::kl_eta) {
      out.push_back(kl_bernoulli(eta, p));
    } else {
      const double up =
          p + eta <= 1.0 ? kl_bernoulli(p + eta, p) : std::numeric_limits<double>::infinity();
      const double dn =
          p - eta >= 0.0 ? kl_bernoulli(p - eta, p) : std::numeric_limits<double>::infinity();
      out.push_back(std::min(up, dn));
    }
  }
  return out;
}

BoundValue ld_bound(const BoundInputs& in, LdExponent mode) {
  if (in.T < 1) raise(errc::invalid_input, "T must be >= 1");
  const auto coef = ld_exponent_coefficients(in.pi0, in.eta, mode);
  double sum = 0.0;
  for (double c : coef) {
    if (std::isnan(c)) continue;  // degenerate coordinate: contributes 0
    if (std::isinf(c)) continue;
    sum += std::exp(-c * static_cast<double>(in.T));
  }
  BoundValue out;
  out.raw = 2.0 * sum;
  out.clamped = std::clamp(out.raw, 0.0, 1.0);
  return out;
}

BoundValue hoeffding_bound(const BoundInputs& in) {
  check_eta(in.eta);
  if (in.T < 1) raise(errc::invalid_input, "T must be >= 1");
  const double m = static_cast<double>(in.pi0.values().size());
  BoundValue out;
  out.raw = 2.0 * m * std::exp(-2.0 * in.eta * in.eta * static_cast<double>(in.T));
  out.clamped = std::clamp(out.raw, 0.0, 1.0);
  return out;
}

long sample_complexity(const MomentVector& pi0, double eta, double delta, BoundKind which,
                       LdExponent mode) {
  check_eta(eta);
  if (!(delta > 0.0) || !(delta <= 1.0))
    raise(errc::invalid_input, "delta must lie in (0,1]");
  if (which == BoundKind::ld) {
    for (double c : ld_exponent_coefficients(pi0, eta, mode))
      if (!std::isnan(c) && c <= 0.0)
        raise(errc::non_decaying_bound,
              "a coordinate exponent is nonpositive; the bound does not decay in T");
  }
  auto bound_at = [&](long T) {
    const BoundInputs in{pi0, 0.0, eta, T};
    return which == BoundKind::ld ? ld_bound(in, mode).clamped : hoeffding_bound(in).clamped;
  };
  if (bound_at(1) <= delta) return 1;
  long hi = 2;
  while (bound_at(hi) > delta) {
    if (hi > (1L << 61)) raise(errc::non_decaying_bound, "no finite sample size reaches delta");
    hi *= 2;
  }
  long lo = hi / 2;  // bound(lo) > delta, bound(hi) <= delta
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (bound_at(mid) <= delta)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double lil_radius(double pi0h, double T) {
  if (!(T >= 3.0)) raise(errc::t_too_small, "law-of-iterated-logarithm radius needs T >= 3");
  if (!(pi0h >= 0.0 && pi0h <= 1.0)) raise(errc::invalid_input, "probability outside [0,1]");
  if (pi0h == 0.0 || pi0h == 1.0) return 0.0;
  return std::sqrt(pi0h * (1.0 - pi0h)) * std::sqrt(2.0 * std::log(std::log(T))) / std::sqrt(T);
}

}  // namespace dpp
