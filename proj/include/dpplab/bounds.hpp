#ifndef DPPLAB_BOUNDS_HPP
#define DPPLAB_BOUNDS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dpplab/estimator.hpp"
#include "dpplab/kernel.hpp"
#include "dpplab/moments.hpp"

namespace dpp {

// rho(K, K') = min over canonical sign patterns of ||D K D - K'||_inf.
// Zero iff the matrices are D-similar; invariant under conjugating either
// argument.
struct RhoDistance {
  double value = 0.0;
  SignPattern argmin = SignPattern::identity(1);
};

RhoDistance rho(const Matrix& K, const Matrix& Kp, int enum_limit = defaults::enum_limit);

enum class EtaMethod { lipschitz, bisection };

inline const char* eta_method_name(EtaMethod m) {
  return m == EtaMethod::lipschitz ? "lipschitz" : "bisection";
}

// Certified perturbation radius: ||pi - pi0||_inf <= eta keeps the recovered
// kernel within epsilon in max norm, verified on seeded probe perturbations
// of max norm exactly eta. When the moment dimension allows, the probe set
// starts with every sign corner of the cube (the map is coordinatewise
// monotone between sign flips, so corners are the binding directions);
// remaining probes are random surface points.
struct EtaCertificate {
  double eta = 0.0;
  double epsilon = 0.0;
  EtaMethod method = EtaMethod::lipschitz;
  int probes = 0;
  double max_deviation = 0.0;   // max ||k(pi0+delta)-k(pi0)||_inf over probes
  double lipschitz_linf = 0.0;  // NaN for the bisection method
};

EtaCertificate eta_modulus(const MomentVector& pi0, double epsilon,
                           EtaMethod method = EtaMethod::lipschitz, int probes = 512,
                           std::uint64_t seed = 0, double deriv_guard = 1e-3);

// Fresh-probe re-verification of a certificate (out-of-sample check).
double eta_probe_max_deviation(const MomentVector& pi0, double eta, int probes,
                               std::uint64_t seed);

struct BoundInputs {
  MomentVector pi0;
  double epsilon = 0.0;
  double eta = 0.0;
  long T = 0;
};

// Exponent choice for the large-deviation sum. `kl_eta` is the default
// coefficient eta*ln(eta/pi_h) + (1-eta)*ln((1-eta)/(1-pi_h)), i.e.
// KL(Bern(eta) || Bern(pi_h)); `kl_two_sided` substitutes the two-sided
// Chernoff coefficient min KL(Bern(pi_h +/- eta) || Bern(pi_h)) as a clearly
// labeled comparison alternative.
enum class LdExponent { kl_eta, kl_two_sided };

struct BoundValue {
  double raw = 0.0;      // the sum as computed; may exceed 1 at small T
  double clamped = 0.0;  // raw clamped into [0,1] for reporting
};

// 2 * sum_h exp(-coef_h * T); coordinates with pi_h exactly 0 or 1
// contribute nothing by convention.
BoundValue ld_bound(const BoundInputs& in, LdExponent mode = LdExponent::kl_eta);

// 2 * (d^2-d+1) * exp(-2 eta^2 T).
BoundValue hoeffding_bound(const BoundInputs& in);

// Per-coordinate exponent coefficients (NaN marks skipped degenerate
// coordinates); used for the sharpness-precondition checks.
std::vector<double> ld_exponent_coefficients(const MomentVector& pi0, double eta,
                                             LdExponent mode = LdExponent::kl_eta);

enum class BoundKind { ld, hoeffding };

// Smallest integer T with bound(T) <= delta, by exponential search then
// bisection on the monotone tail.
long sample_complexity(const MomentVector& pi0, double eta, double delta, BoundKind which,
                       LdExponent mode = LdExponent::kl_eta);

// Law-of-iterated-logarithm envelope radius
// sqrt(pi(1-pi)) * sqrt(2 ln ln T) / sqrt(T); zero at pi in {0,1}.
double lil_radius(double pi0h, double T);

}  // namespace dpp

#endif
