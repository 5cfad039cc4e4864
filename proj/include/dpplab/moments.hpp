#ifndef DPPLAB_MOMENTS_HPP
#define DPPLAB_MOMENTS_HPP

#include <string>
#include <vector>

#include "dpplab/kernel.hpp"

namespace dpp {

enum class Regime { strict, robust };

inline const char* regime_name(Regime r) { return r == Regime::strict ? "strict" : "robust"; }

// One labeled coordinate of a moment vector.
struct MomentKey {
  enum class Kind { marginal, pair, triple } kind;
  int i = 0;  // 1-based
  int j = 0;  // 0 for marginals; triple is (pivot, i, j)
};

// The d^2-d+1 inclusion probabilities that determine the kernel: marginals
// P[X_i=1], pairwise P[X_i=X_j=1] (i<j), and pivot-anchored threewise
// P[X_p=X_i=X_j=1] (i<j, both != p). Canonical ordering: marginals
// ascending, then pairs lexicographic, then triples lexicographic over (i,j).
class MomentVector {
 public:
  MomentVector(int d, int pivot, Vector values, bool validate = true);

  int dim() const { return d_; }
  int pivot() const { return pivot_; }
  const Vector& values() const { return values_; }

  double marginal(int i) const { return values_[i - 1]; }
  double pair(int i, int j) const { return values_[pair_offset(i, j)]; }
  double triple(int i, int j) const { return values_[triple_offset(i, j)]; }

  static int length(int d) { return d * d - d + 1; }
  std::vector<MomentKey> keys() const;

 private:
  int pair_offset(int i, int j) const;
  int triple_offset(int i, int j) const;

  int d_;
  int pivot_;
  Vector values_;
};

}  // namespace dpp

#endif
