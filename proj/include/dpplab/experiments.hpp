#ifndef DPPLAB_EXPERIMENTS_HPP
#define DPPLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dpplab/bounds.hpp"
#include "dpplab/kernel.hpp"
#include "dpplab/moments.hpp"

namespace dpp {

// A repeatable Monte Carlo recipe. Thresholds are data, not code: every
// pass/fail number the report applies is carried here and serialized with
// the results. Replication r of grid point t draws from the stream
// (t << 32) | r of the spec seed, so aggregates are independent of
// evaluation order.
struct ExperimentSpec {
  std::string name;      // consistency | normality | bound_validation | pivot_invariance
  Matrix truth;          // the true kernel
  std::string family;    // optional: family name when truth came from one
  Vector theta0;         // optional: generating parameter
  std::vector<long> T_grid;
  int n_reps = 1;
  int pivot = 1;
  Regime regime = Regime::strict;
  std::uint64_t seed = 0;
  double epsilon = 0.0;  // bound_validation accuracy target
  EtaMethod eta_method = EtaMethod::lipschitz;
  std::map<std::string, double> thresholds;

  std::string to_json_string() const;
  static ExperimentSpec from_json_string(const std::string& text);
};

struct Verdict {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparison;  // "<=", ">=", "strictly_decreasing", "within"
  bool pass = false;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<std::string> records;  // JSONL lines, one per (T, replication)
  std::string aggregates_json;
  std::vector<Verdict> verdicts;
  bool pass = false;

  std::string to_json_string() const;  // spec + aggregates + verdicts + stamp
};

// Median max-abs error and sign-recovery rate per T; monotone-decrease
// verdict across the grid; strict-regime failure rates and robust-regime
// clip frequencies reported (with an optional window verdict on a designated
// entry via thresholds clip_i/clip_j/clip_freq_lo/clip_freq_hi).
ExperimentReport run_consistency(const ExperimentSpec& spec, int threads = 1);

// Standardized per-entry errors against the delta-method sigma at the truth;
// mean/variance window verdicts and the scale-relative comparison of the
// Monte Carlo covariance against the delta-method covariance.
ExperimentReport run_normality(const ExperimentSpec& spec, int threads = 1);

// Empirical P[rho > epsilon] per T against the large-deviation and Hoeffding
// curves at the certified eta; validity, sharpness-ordering and
// sample-complexity-ordering verdicts.
ExperimentReport run_bound_validation(const ExperimentSpec& spec, int threads = 1);

// Estimates from pivots 1 and 2 per replication; success when a conjugation
// pattern matches them within 10/sqrt(T); rate verdict per T.
ExperimentReport run_pivot_invariance(const ExperimentSpec& spec, int threads = 1);

// Dispatch on spec.name.
ExperimentReport run_experiment(const ExperimentSpec& spec, int threads = 1);

// Built-in desk-scale recipes with pinned thresholds:
//   consistency, consistency_strict, robust_zero, normality, bound_validation,
//   pivot_invariance.
ExperimentSpec default_spec(const std::string& recipe);
std::vector<std::string> default_recipes();

}  // namespace dpp

#endif
