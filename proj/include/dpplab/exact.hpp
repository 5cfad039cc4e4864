#ifndef DPPLAB_EXACT_HPP
#define DPPLAB_EXACT_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dpplab/kernel.hpp"
#include "dpplab/moments.hpp"

namespace dpp {

// The full pmf over all 2^d subsets, in lexicographic subset order. This is
// the brute-force oracle; it refuses d beyond the enumeration cap.
struct ExactDistribution {
  int d = 0;
  std::vector<SubsetIndex> subsets;
  std::vector<double> probs;

  double prob_of(const SubsetIndex& s) const;
  std::string to_json_string() const;
  static ExactDistribution from_json_string(const std::string& text);
};

// Principal minors of order 1, 2 and pivot-anchored order 3, in the moment
// ordering. These are exactly the inclusion probabilities stacked by
// MomentVector, so the table converts to one directly.
struct MinorTable {
  int d = 0;
  int pivot = 1;
  std::vector<double> order1;        // K_ii, i ascending
  std::vector<double> order2;        // det K_{i,j}, (i,j) i<j lexicographic
  std::vector<double> order3_pivot;  // det K_{p,i,j}, (i,j) i<j lex, i,j != p

  MomentVector to_moments() const;
};

// p(s) = det Sigma_s / det(I + Sigma).
double pmf_sigma(const LEnsemble& S, const SubsetIndex& s);

// p(s) = det(I_s K + I_sbar (I - K)); equal to the Sigma form.
double pmf_k(const CorrelationKernel& K, const SubsetIndex& s);

// P[s subseteq S] = det K_s.
double inclusion_prob(const CorrelationKernel& K, const SubsetIndex& s);

ExactDistribution enumerate_distribution(const CorrelationKernel& K,
                                         int enum_limit = defaults::enum_limit);

MomentVector exact_moment_vector(const CorrelationKernel& K, int pivot = 1);

MinorTable minor_table(const CorrelationKernel& K, int pivot = 1);

// Reconstructs the canonical representative from the order<=3 minors and
// compares every principal minor of the reconstruction against K:
// exhaustively for d <= 6, on 500 seeded random subsets above that.
struct ReconstructionReport {
  int d = 0;
  int pivot = 1;
  Regime regime = Regime::strict;
  std::size_t subsets_checked = 0;
  double max_deviation = 0.0;
  double order4_deviation = 0.0;  // |{1,2,3,4}| minor gap; NaN when d < 4
  bool pass = false;              // max_deviation <= tolerance
  Matrix reconstructed;
};

ReconstructionReport verify_minor_reconstruction(const CorrelationKernel& K, int pivot = 1,
                                                 Regime regime = Regime::strict,
                                                 double tolerance = 1e-10,
                                                 int enum_limit = defaults::enum_limit);

}  // namespace dpp

#endif
