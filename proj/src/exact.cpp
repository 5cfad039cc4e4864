#include "dpplab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dpplab/estimator.hpp"
#include "dpplab/rng.hpp"
#include "json.hpp"

namespace dpp {

// ---------------------------------------------------------------------------
// MomentVector

MomentVector::MomentVector(int d, int pivot, Vector values, bool validate)
    : d_(d), pivot_(pivot), values_(std::move(values)) {
  if (d_ < 2) raise(errc::invalid_input, "moment vector needs d >= 2");
  if (pivot_ < 1 || pivot_ > d_) raise(errc::invalid_input, "pivot out of range");
  if (values_.size() != length(d_))
    raise(errc::invalid_input, "moment vector has wrong length " +
                                   std::to_string(values_.size()) + ", expected " +
                                   std::to_string(length(d_)));
  if (!validate) return;
  constexpr double slack = 1e-12;
  for (Eigen::Index h = 0; h < values_.size(); ++h)
    if (!(values_[h] >= 0.0 && values_[h] <= 1.0))
      raise(errc::invalid_input, "moment entry outside [0,1]");
  for (int i = 1; i <= d_; ++i)
    for (int j = i + 1; j <= d_; ++j)
      if (pair(i, j) > std::min(marginal(i), marginal(j)) + slack)
        raise(errc::invalid_input, "pairwise moment exceeds a marginal");
  for (int i = 1; i <= d_; ++i) {
    if (i == pivot_) continue;
    for (int j = i + 1; j <= d_; ++j) {
      if (j == pivot_) continue;
      const double cap = std::min({pair(i, j), pair(std::min(pivot_, i), std::max(pivot_, i)),
                                   pair(std::min(pivot_, j), std::max(pivot_, j))});
      if (triple(i, j) > cap + slack)
        raise(errc::invalid_input, "threewise moment exceeds a pairwise moment");
    }
  }
}

int MomentVector::pair_offset(int i, int j) const {
  return d_ + (i - 1) * (2 * d_ - i) / 2 + (j - i - 1);
}

int MomentVector::triple_offset(int i, int j) const {
  int rank = 0;
  for (int a = 1; a <= d_; ++a) {
    if (a == pivot_) continue;
    for (int b = a + 1; b <= d_; ++b) {
      if (b == pivot_) continue;
      if (a == i && b == j) return d_ + d_ * (d_ - 1) / 2 + rank;
      ++rank;
    }
  }
  raise(errc::invalid_input, "no threewise moment for (" + std::to_string(i) + "," +
                                 std::to_string(j) + ") at pivot " + std::to_string(pivot_));
}

std::vector<MomentKey> MomentVector::keys() const {
  std::vector<MomentKey> out;
  out.reserve(static_cast<std::size_t>(length(d_)));
  for (int i = 1; i <= d_; ++i) out.push_back({MomentKey::Kind::marginal, i, 0});
  for (int i = 1; i <= d_; ++i)
    for (int j = i + 1; j <= d_; ++j) out.push_back({MomentKey::Kind::pair, i, j});
  for (int i = 1; i <= d_; ++i) {
    if (i == pivot_) continue;
    for (int j = i + 1; j <= d_; ++j) {
      if (j == pivot_) continue;
      out.push_back({MomentKey::Kind::triple, i, j});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// pmf and inclusion probabilities

double pmf_sigma(const LEnsemble& S, const SubsetIndex& s) {
  if (s.max_index() > S.dim()) raise(errc::invalid_input, "subset exceeds dimension");
  return principal_minor(S.matrix(), s) / S.det_i_plus_sigma();
}

double pmf_k(const CorrelationKernel& K, const SubsetIndex& s) {
  const int d = K.dim();
  if (s.max_index() > d) raise(errc::invalid_input, "subset exceeds dimension");
  Matrix M(d, d);
  for (int i = 0; i < d; ++i) {
    if (s.contains(i + 1)) {
      M.row(i) = K.matrix().row(i);
    } else {
      M.row(i) = -K.matrix().row(i);
      M(i, i) += 1.0;
    }
  }
  return Eigen::PartialPivLU<Matrix>(M).determinant();
}

double inclusion_prob(const CorrelationKernel& K, const SubsetIndex& s) {
  if (s.max_index() > K.dim()) raise(errc::invalid_input, "subset exceeds dimension");
  return principal_minor(K.matrix(), s);
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

void gen_lex_subsets(int d, int next, std::vector<int>& cur, std::vector<SubsetIndex>& out) {
  out.push_back(SubsetIndex(cur));
  for (int v = next; v <= d; ++v) {
    cur.push_back(v);
    gen_lex_subsets(d, v + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

ExactDistribution enumerate_distribution(const CorrelationKernel& K, int enum_limit) {
  const int d = K.dim();
  if (d > enum_limit)
    raise(errc::refuse_large_d, "2^d enumeration refused at d = " + std::to_string(d));
  ExactDistribution dist;
  dist.d = d;
  std::vector<int> cur;
  gen_lex_subsets(d, 1, cur, dist.subsets);
  dist.probs.reserve(dist.subsets.size());
  double sum = 0.0;
  for (const auto& s : dist.subsets) {
    const double p = pmf_k(K, s);
    dist.probs.push_back(p);
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    raise(errc::numerical_singularity,
          "enumerated pmf sums to " + std::to_string(sum) + ", not 1");
  return dist;
}

double ExactDistribution::prob_of(const SubsetIndex& s) const {
  for (std::size_t k = 0; k < subsets.size(); ++k)
    if (subsets[k] == s) return probs[k];
  raise(errc::invalid_input, "subset not present in the distribution table");
}

std::string ExactDistribution::to_json_string() const {
  nlohmann::json j;
  j["d"] = d;
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t k = 0; k < subsets.size(); ++k)
    arr.push_back({{"s", subsets[k].members()}, {"p", probs[k]}});
  j["probs"] = std::move(arr);
  return j.dump();
}

ExactDistribution ExactDistribution::from_json_string(const std::string& text) {
  ExactDistribution dist;
  try {
    const auto j = nlohmann::json::parse(text);
    dist.d = j.at("d").get<int>();
    for (const auto& e : j.at("probs")) {
      dist.subsets.push_back(SubsetIndex(e.at("s").get<std::vector<int>>()));
      dist.probs.push_back(e.at("p").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    raise(errc::io_error, std::string("bad distribution JSON: ") + e.what());
  }
  if (dist.subsets.size() != (std::size_t{1} << dist.d))
    raise(errc::io_error, "distribution table has wrong cardinality");
  return dist;
}

// ---------------------------------------------------------------------------
// Moments and minors

MomentVector exact_moment_vector(const CorrelationKernel& K, int pivot) {
  const int d = K.dim();
  if (pivot < 1 || pivot > d) raise(errc::invalid_input, "pivot out of range");
  Vector v(MomentVector::length(d));
  int h = 0;
  for (int i = 1; i <= d; ++i) v[h++] = inclusion_prob(K, SubsetIndex({i}));
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) v[h++] = inclusion_prob(K, SubsetIndex({i, j}));
  for (int i = 1; i <= d; ++i) {
    if (i == pivot) continue;
    for (int j = i + 1; j <= d; ++j) {
      if (j == pivot) continue;
      v[h++] = inclusion_prob(K, SubsetIndex({pivot, i, j}));
    }
  }
  return MomentVector(d, pivot, std::move(v));
}

MinorTable minor_table(const CorrelationKernel& K, int pivot) {
  const MomentVector pi = exact_moment_vector(K, pivot);
  MinorTable mt;
  mt.d = K.dim();
  mt.pivot = pivot;
  const int d = mt.d;
  for (int i = 1; i <= d; ++i) mt.order1.push_back(pi.marginal(i));
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) mt.order2.push_back(pi.pair(i, j));
  for (int i = 1; i <= d; ++i) {
    if (i == pivot) continue;
    for (int j = i + 1; j <= d; ++j) {
      if (j == pivot) continue;
      mt.order3_pivot.push_back(pi.triple(i, j));
    }
  }
  return mt;
}

MomentVector MinorTable::to_moments() const {
  Vector v(MomentVector::length(d));
  int h = 0;
  for (double x : order1) v[h++] = x;
  for (double x : order2) v[h++] = x;
  for (double x : order3_pivot) v[h++] = x;
  return MomentVector(d, pivot, std::move(v));
}

// ---------------------------------------------------------------------------
// Minor reconstruction check

ReconstructionReport verify_minor_reconstruction(const CorrelationKernel& K, int pivot,
                                                 Regime regime, double tolerance,
                                                 int enum_limit) {
  const int d = K.dim();
  if (d > enum_limit)
    raise(errc::refuse_large_d, "reconstruction check refused at d = " + std::to_string(d));
  if (pivot < 1 || pivot > d) raise(errc::invalid_input, "pivot out of range");

  for (int i = 1; i <= d; ++i) {
    for (int j = i + 1; j <= d; ++j) {
      const bool in_pivot_row = (i == pivot || j == pivot);
      if (regime == Regime::strict || in_pivot_row) {
        if (std::abs(K(i, j)) <= defaults::zero_tol)
          raise(errc::assumption_violated, "entry (" + std::to_string(i) + "," +
                                               std::to_string(j) + ") is zero");
      }
    }
  }

  const MomentVector pi = minor_table(K, pivot).to_moments();
  const EstimatedKernel rec =
      regime == Regime::strict ? recover_from_moments(pi) : recover_robust(pi);

  ReconstructionReport rep;
  rep.d = d;
  rep.pivot = pivot;
  rep.regime = regime;
  rep.reconstructed = rec.kernel;
  rep.order4_deviation = std::numeric_limits<double>::quiet_NaN();

  auto check = [&](const SubsetIndex& s) {
    const double dev =
        std::abs(principal_minor(rec.kernel, s) - principal_minor(K.matrix(), s));
    rep.max_deviation = std::max(rep.max_deviation, dev);
    ++rep.subsets_checked;
    return dev;
  };

  if (d <= 6) {
    for (std::uint32_t m = 1; m < (1u << d); ++m) {
      const SubsetIndex s = SubsetIndex::from_mask(m);
      const double dev = check(s);
      if (d >= 4 && m == 0xFu) rep.order4_deviation = dev;
    }
  } else {
    Philox gen(0xD5u, 0);
    for (int k = 0; k < 500; ++k) {
      std::uint32_t m = 0;
      while (m == 0) m = static_cast<std::uint32_t>(gen.next_u64()) & ((1u << d) - 1u);
      check(SubsetIndex::from_mask(m));
    }
    rep.order4_deviation = check(SubsetIndex({1, 2, 3, 4}));
  }
  rep.pass = rep.max_deviation <= tolerance;
  return rep;
}

}  // namespace dpp
