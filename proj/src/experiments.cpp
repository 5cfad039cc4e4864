#include "dpplab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dpplab/constrained.hpp"
#include "dpplab/estimator.hpp"
#include "dpplab/exact.hpp"
#include "dpplab/sampler.hpp"
#include "dpplab/threads.hpp"
#include "json.hpp"

namespace dpp {

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kGenerator = "philox4x32-10/v1";

// Replication r of grid point t draws from stream (t << 32) | r, so records
// depend only on (seed, t, r), never on evaluation order.
SeedSpec rep_seed(std::uint64_t base, std::size_t t_idx, long rep) {
  return {base, (static_cast<std::uint64_t>(t_idx) << 32) | static_cast<std::uint64_t>(rep)};
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

nlohmann::json matrix_to_json(const Matrix& M) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(M.rows()));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) rows[i].push_back(M(i, j));
  return nlohmann::json(rows);
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  Matrix M(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < rows[i].size(); ++c)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
  return M;
}

int sgn_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

double threshold_or(const ExperimentSpec& spec, const std::string& key, double fallback) {
  const auto it = spec.thresholds.find(key);
  return it == spec.thresholds.end() ? fallback : it->second;
}

bool has_threshold(const ExperimentSpec& spec, const std::string& key) {
  return spec.thresholds.count(key) != 0;
}

nlohmann::json verdicts_to_json(const std::vector<Verdict>& vs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : vs)
    arr.push_back({{"name", v.name},
                   {"value", v.value},
                   {"threshold", v.threshold},
                   {"comparison", v.comparison},
                   {"pass", v.pass}});
  return arr;
}

void finish_report(ExperimentReport& rep) {
  rep.pass = std::all_of(rep.verdicts.begin(), rep.verdicts.end(),
                         [](const Verdict& v) { return v.pass; });
}

}  // namespace

// ---------------------------------------------------------------------------
// Spec serialization

std::string ExperimentSpec::to_json_string() const {
  nlohmann::json j;
  j["name"] = name;
  if (!family.empty()) {
    j["truth"] = {{"family", family},
                  {"theta", std::vector<double>(theta0.data(), theta0.data() + theta0.size())},
                  {"d", static_cast<int>(truth.rows())}};
  } else {
    j["truth"] = {{"kernel", matrix_to_json(truth)}};
  }
  j["T_grid"] = T_grid;
  j["n_reps"] = n_reps;
  j["pivot"] = pivot;
  j["regime"] = regime_name(regime);
  j["seed"] = seed;
  j["epsilon"] = epsilon;
  j["eta_method"] = eta_method_name(eta_method);
  j["thresholds"] = thresholds;
  return j.dump(2);
}

ExperimentSpec ExperimentSpec::from_json_string(const std::string& text) {
  ExperimentSpec spec;
  try {
    const auto j = nlohmann::json::parse(text);
    spec.name = j.at("name").get<std::string>();
    const auto& truth = j.at("truth");
    if (truth.contains("kernel")) {
      spec.truth = matrix_from_json(truth.at("kernel"));
    } else {
      spec.family = truth.at("family").get<std::string>();
      const auto th = truth.at("theta").get<std::vector<double>>();
      spec.theta0 = Eigen::Map<const Vector>(th.data(), static_cast<Eigen::Index>(th.size()));
      const int d = truth.at("d").get<int>();
      const ParametricFamily fam = spec.family == "equicovariance" ? family_equicovariance(d)
                                   : spec.family == "toeplitz"
                                       ? family_toeplitz(d)
                                       : throw Error(errc::invalid_input,
                                                     "unknown family " + spec.family);
      spec.truth = fam.map(spec.theta0);
    }
    spec.T_grid = j.at("T_grid").get<std::vector<long>>();
    spec.n_reps = j.at("n_reps").get<int>();
    spec.pivot = j.value("pivot", 1);
    spec.regime = j.value("regime", std::string("strict")) == "robust" ? Regime::robust
                                                                       : Regime::strict;
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.epsilon = j.value("epsilon", 0.0);
    spec.eta_method = j.value("eta_method", std::string("lipschitz")) == "bisection"
                          ? EtaMethod::bisection
                          : EtaMethod::lipschitz;
    if (j.contains("thresholds"))
      spec.thresholds = j.at("thresholds").get<std::map<std::string, double>>();
  } catch (const nlohmann::json::exception& e) {
    raise(errc::io_error, std::string("bad experiment spec JSON: ") + e.what());
  }
  if (spec.n_reps < 1) raise(errc::invalid_input, "n_reps must be >= 1");
  for (std::size_t k = 1; k < spec.T_grid.size(); ++k)
    if (spec.T_grid[k] <= spec.T_grid[k - 1])
      raise(errc::invalid_input, "T_grid must be strictly increasing");
  return spec;
}

std::string ExperimentReport::to_json_string() const {
  nlohmann::json j;
  j["spec"] = nlohmann::json::parse(spec.to_json_string());
  j["aggregates"] = nlohmann::json::parse(aggregates_json);
  j["verdicts"] = verdicts_to_json(verdicts);
  j["pass"] = pass;
  j["n_records"] = records.size();
  j["environment"] = {{"version", kVersion}, {"generator", kGenerator}, {"seed", spec.seed}};
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Consistency (strict failure rates, robust clip frequencies included)

ExperimentReport run_consistency(const ExperimentSpec& spec, int threads) {
  const CorrelationKernel K = validate_kernel(spec.truth);
  const Matrix Kstar = canonicalize(K, spec.pivot).first.matrix();
  const int d = K.dim();

  struct Outcome {
    bool failed = false;
    double max_err = 0.0, rho_val = 0.0;
    bool sign_ok = false;
    std::vector<std::pair<int, int>> clips;
  };

  ExperimentReport rep;
  rep.spec = spec;
  nlohmann::json agg;
  agg["per_T"] = nlohmann::json::array();

  std::vector<double> medians;
  for (std::size_t t_idx = 0; t_idx < spec.T_grid.size(); ++t_idx) {
    const long T = spec.T_grid[t_idx];
    std::vector<Outcome> out(static_cast<std::size_t>(spec.n_reps));
    parallel_for(spec.n_reps, threads, [&](long r) {
      Outcome& o = out[static_cast<std::size_t>(r)];
      const SampleMatrix X = sample_dpp(K, T, rep_seed(spec.seed, t_idx, r));
      try {
        const EstimatedKernel est = estimate(X, spec.pivot, spec.regime);
        o.max_err = (est.kernel - Kstar).cwiseAbs().maxCoeff();
        o.rho_val = rho(K.matrix(), est.kernel).value;
        o.sign_ok = true;
        for (int i = 1; i <= d && o.sign_ok; ++i)
          for (int j = i + 1; j <= d && o.sign_ok; ++j)
            if (Kstar(i - 1, j - 1) != 0.0 &&
                sgn_of(est.kernel(i - 1, j - 1)) != sgn_of(Kstar(i - 1, j - 1)))
              o.sign_ok = false;
        for (const auto& c : est.clip_events) o.clips.emplace_back(c.i, c.j);
      } catch (const Error&) {
        o.failed = true;
      }
    });

    std::vector<double> errs;
    long failures = 0, sign_hits = 0;
    long clip_target_hits = 0, clip_total = 0;
    const int ci = static_cast<int>(threshold_or(spec, "clip_i", 0));
    const int cj = static_cast<int>(threshold_or(spec, "clip_j", 0));
    for (long r = 0; r < spec.n_reps; ++r) {
      const Outcome& o = out[static_cast<std::size_t>(r)];
      nlohmann::json line = {{"T", T}, {"rep", r}, {"failed", o.failed}};
      if (o.failed) {
        line["max_abs_error"] = nullptr;
        ++failures;
      } else {
        line["max_abs_error"] = o.max_err;
        line["rho"] = o.rho_val;
        line["sign_correct"] = o.sign_ok;
        line["clip_count"] = o.clips.size();
        nlohmann::json clips = nlohmann::json::array();
        for (const auto& cp : o.clips) clips.push_back({cp.first, cp.second});
        line["clips"] = std::move(clips);
        errs.push_back(o.max_err);
        if (o.sign_ok) ++sign_hits;
        clip_total += static_cast<long>(o.clips.size());
        for (const auto& c : o.clips)
          if (c.first == ci && c.second == cj) ++clip_target_hits;
      }
      rep.records.push_back(line.dump());
    }
    const long ok = spec.n_reps - failures;
    nlohmann::json per = {{"T", T},
                          {"n", spec.n_reps},
                          {"failures", failures},
                          {"failure_rate", static_cast<double>(failures) / spec.n_reps},
                          {"median_max_abs_error", median(errs)},
                          {"sign_rate", ok > 0 ? static_cast<double>(sign_hits) / ok : 0.0},
                          {"mean_clip_count", ok > 0 ? static_cast<double>(clip_total) / ok : 0.0}};
    if (has_threshold(spec, "clip_i"))
      per["clip_frequency_at_target"] =
          ok > 0 ? static_cast<double>(clip_target_hits) / ok : 0.0;
    agg["per_T"].push_back(per);
    medians.push_back(median(errs));
  }

  if (medians.size() >= 2) {
    bool dec = true;
    for (std::size_t k = 1; k < medians.size(); ++k)
      if (!(medians[k] < medians[k - 1])) dec = false;
    rep.verdicts.push_back(
        {"median_max_abs_error_strictly_decreasing", dec ? 1.0 : 0.0, 1.0, ">=", dec});
  }
  if (has_threshold(spec, "sign_rate_min")) {
    const double want = threshold_or(spec, "sign_rate_min", 0.99);
    const double got = agg["per_T"].back()["sign_rate"].get<double>();
    rep.verdicts.push_back({"sign_rate_at_largest_T", got, want, ">=", got >= want});
  }
  if (has_threshold(spec, "clip_freq_lo")) {
    const double lo = threshold_or(spec, "clip_freq_lo", 0.45);
    const double hi = threshold_or(spec, "clip_freq_hi", 0.55);
    const double got = agg["per_T"].back()["clip_frequency_at_target"].get<double>();
    rep.verdicts.push_back(
        {"clip_frequency_within_window", got, lo, ">=", got >= lo && got <= hi});
    rep.verdicts.push_back({"clip_frequency_within_window_hi", got, hi, "<=", got <= hi});
  }
  rep.aggregates_json = agg.dump();
  finish_report(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Normality

ExperimentReport run_normality(const ExperimentSpec& spec, int threads) {
  const CorrelationKernel K = validate_kernel(spec.truth);
  const long T = spec.T_grid.front();
  const MomentVector pi0 = exact_moment_vector(K, spec.pivot);
  const Matrix Asym = asymptotic_covariance(pi0, T).matrix;
  const Vector vstar = vech(canonicalize(K, spec.pivot).first.matrix());
  const int nv = static_cast<int>(vstar.size());
  Vector sigma(nv);
  for (int v = 0; v < nv; ++v) sigma[v] = std::sqrt(Asym(v, v));

  struct Outcome {
    bool failed = false;
    Vector dev;  // sqrt(T) * (vech estimate - vech truth)
  };
  std::vector<Outcome> out(static_cast<std::size_t>(spec.n_reps));
  parallel_for(spec.n_reps, threads, [&](long r) {
    Outcome& o = out[static_cast<std::size_t>(r)];
    const SampleMatrix X = sample_dpp(K, T, rep_seed(spec.seed, 0, r));
    try {
      const EstimatedKernel est = estimate(X, spec.pivot, Regime::strict);
      o.dev = std::sqrt(static_cast<double>(T)) * (vech(est.kernel) - vstar);
    } catch (const Error&) {
      o.failed = true;
    }
  });

  ExperimentReport rep;
  rep.spec = spec;
  long failures = 0;
  Vector mean = Vector::Zero(nv);
  std::vector<Vector> devs;
  for (long r = 0; r < spec.n_reps; ++r) {
    const Outcome& o = out[static_cast<std::size_t>(r)];
    nlohmann::json line = {{"T", T}, {"rep", r}, {"failed", o.failed}};
    if (o.failed) {
      ++failures;
    } else {
      std::vector<double> z(static_cast<std::size_t>(nv));
      for (int v = 0; v < nv; ++v) z[static_cast<std::size_t>(v)] = o.dev[v] / sigma[v];
      line["z"] = z;
      mean += o.dev;
      devs.push_back(o.dev);
    }
    rep.records.push_back(line.dump());
  }
  const long n_ok = static_cast<long>(devs.size());
  if (n_ok < 2) raise(errc::empty_sample, "not enough successful replications");
  mean /= static_cast<double>(n_ok);
  Matrix mc = Matrix::Zero(nv, nv);
  for (const auto& devv : devs) {
    const Vector c = devv - mean;
    mc.noalias() += c * c.transpose();
  }
  mc /= static_cast<double>(n_ok - 1);

  double max_mean_z = 0.0, min_var_z = 1e300, max_var_z = 0.0, max_rel = 0.0;
  nlohmann::json per_entry = nlohmann::json::array();
  for (int v = 0; v < nv; ++v) {
    const double mz = mean[v] / sigma[v];
    const double vz = mc(v, v) / Asym(v, v);
    per_entry.push_back({{"vech_index", v}, {"mean_z", mz}, {"var_z", vz}});
    max_mean_z = std::max(max_mean_z, std::abs(mz));
    min_var_z = std::min(min_var_z, vz);
    max_var_z = std::max(max_var_z, vz);
  }
  for (int v = 0; v < nv; ++v)
    for (int w = 0; w < nv; ++w)
      max_rel = std::max(max_rel, std::abs(mc(v, w) - Asym(v, w)) / (sigma[v] * sigma[w]));

  nlohmann::json agg;
  agg["T"] = T;
  agg["failures"] = failures;
  agg["per_entry"] = per_entry;
  agg["max_abs_mean_z"] = max_mean_z;
  agg["min_var_z"] = min_var_z;
  agg["max_var_z"] = max_var_z;
  agg["max_cov_scale_relative_error"] = max_rel;
  agg["asymptotic_covariance"] = matrix_to_json(Asym);
  agg["monte_carlo_covariance"] = matrix_to_json(mc);
  rep.aggregates_json = agg.dump();

  const double mean_cap = threshold_or(spec, "z_mean_abs_max", 0.1);
  const double var_lo = threshold_or(spec, "z_var_lo", 0.85);
  const double var_hi = threshold_or(spec, "z_var_hi", 1.15);
  const double rel_cap = threshold_or(spec, "cov_rel_max", 0.15);
  rep.verdicts.push_back({"max_abs_mean_z", max_mean_z, mean_cap, "<=", max_mean_z <= mean_cap});
  rep.verdicts.push_back({"min_var_z", min_var_z, var_lo, ">=", min_var_z >= var_lo});
  rep.verdicts.push_back({"max_var_z", max_var_z, var_hi, "<=", max_var_z <= var_hi});
  rep.verdicts.push_back(
      {"max_cov_scale_relative_error", max_rel, rel_cap, "<=", max_rel <= rel_cap});
  finish_report(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Bound validation

ExperimentReport run_bound_validation(const ExperimentSpec& spec, int threads) {
  const CorrelationKernel K = validate_kernel(spec.truth);
  if (!(spec.epsilon > 0.0)) raise(errc::invalid_input, "epsilon must be positive");
  const MomentVector pi0 = exact_moment_vector(K, spec.pivot);
  const EtaCertificate cert =
      eta_modulus(pi0, spec.epsilon, spec.eta_method, 512, spec.seed ^ 0xE7A5EEDull);

  ExperimentReport rep;
  rep.spec = spec;
  nlohmann::json agg;
  agg["eta"] = cert.eta;
  agg["eta_certificate"] = {{"eta", cert.eta},
                            {"epsilon", cert.epsilon},
                            {"method", eta_method_name(cert.method)},
                            {"probes", cert.probes},
                            {"max_deviation", cert.max_deviation}};
  agg["per_T"] = nlohmann::json::array();

  // Sharpness precondition: every evaluable coordinate coefficient at least
  // eta^2.
  const auto coefs = ld_exponent_coefficients(pi0, cert.eta, LdExponent::kl_eta);
  bool precondition = true;
  for (double c : coefs)
    if (!std::isnan(c) && c < cert.eta * cert.eta) precondition = false;
  agg["kl_geq_eta_sq"] = precondition;

  for (std::size_t t_idx = 0; t_idx < spec.T_grid.size(); ++t_idx) {
    const long T = spec.T_grid[t_idx];
    std::vector<double> rhos(static_cast<std::size_t>(spec.n_reps));
    parallel_for(spec.n_reps, threads, [&](long r) {
      const SampleMatrix X = sample_dpp(K, T, rep_seed(spec.seed, t_idx, r));
      try {
        const EstimatedKernel est = estimate(X, spec.pivot, Regime::strict);
        rhos[static_cast<std::size_t>(r)] = rho(K.matrix(), est.kernel).value;
      } catch (const Error&) {
        rhos[static_cast<std::size_t>(r)] = std::numeric_limits<double>::infinity();
      }
    });
    long exceed = 0;
    for (long r = 0; r < spec.n_reps; ++r) {
      const double rv = rhos[static_cast<std::size_t>(r)];
      nlohmann::json line = {{"T", T}, {"rep", r}, {"exceeds", !(rv <= spec.epsilon)}};
      if (std::isinf(rv))
        line["rho"] = nullptr;
      else
        line["rho"] = rv;
      rep.records.push_back(line.dump());
      if (!(rv <= spec.epsilon)) ++exceed;
    }
    const double empirical = static_cast<double>(exceed) / spec.n_reps;
    const BoundInputs in{pi0, spec.epsilon, cert.eta, T};
    const BoundValue ld = ld_bound(in);
    const BoundValue hf = hoeffding_bound(in);
    agg["per_T"].push_back({{"T", T},
                            {"empirical_tail", empirical},
                            {"ld_bound_raw", ld.raw},
                            {"ld_bound", ld.clamped},
                            {"hoeffding_raw", hf.raw},
                            {"hoeffding", hf.clamped}});
    rep.verdicts.push_back({"empirical_leq_ld_at_T" + std::to_string(T), empirical, ld.clamped,
                            "<=", empirical <= ld.clamped});
    if (precondition)
      rep.verdicts.push_back({"ld_leq_hoeffding_at_T" + std::to_string(T), ld.raw, hf.raw, "<=",
                              ld.raw <= hf.raw});
  }

  const double delta = threshold_or(spec, "delta", 0.05);
  const long t_ld = sample_complexity(pi0, cert.eta, delta, BoundKind::ld);
  const long t_hf = sample_complexity(pi0, cert.eta, delta, BoundKind::hoeffding);
  agg["delta"] = delta;
  agg["T_star_ld"] = t_ld;
  agg["T_star_hoeffding"] = t_hf;
  rep.verdicts.push_back({"T_star_ld_leq_hoeffding", static_cast<double>(t_ld),
                          static_cast<double>(t_hf), "<=", t_ld <= t_hf});
  rep.aggregates_json = agg.dump();
  finish_report(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Pivot invariance

ExperimentReport run_pivot_invariance(const ExperimentSpec& spec, int threads) {
  const CorrelationKernel K = validate_kernel(spec.truth);
  if (K.dim() < 2) raise(errc::invalid_input, "need at least two admissible pivots");

  ExperimentReport rep;
  rep.spec = spec;
  nlohmann::json agg;
  agg["pivots"] = {1, 2};
  agg["per_T"] = nlohmann::json::array();

  for (std::size_t t_idx = 0; t_idx < spec.T_grid.size(); ++t_idx) {
    const long T = spec.T_grid[t_idx];
    const double tol = 10.0 / std::sqrt(static_cast<double>(T));
    std::vector<int> success(static_cast<std::size_t>(spec.n_reps), 0);
    parallel_for(spec.n_reps, threads, [&](long r) {
      const SampleMatrix X = sample_dpp(K, T, rep_seed(spec.seed, t_idx, r));
      try {
        const EstimatedKernel e1 = estimate(X, 1, Regime::strict);
        const EstimatedKernel e2 = estimate(X, 2, Regime::strict);
        if (d_similarity_between(e1.kernel, e2.kernel, tol).has_value())
          success[static_cast<std::size_t>(r)] = 1;
      } catch (const Error&) {
      }
    });
    long hits = 0;
    for (long r = 0; r < spec.n_reps; ++r) {
      hits += success[static_cast<std::size_t>(r)];
      rep.records.push_back(nlohmann::json({{"T", T},
                                            {"rep", r},
                                            {"success", success[static_cast<std::size_t>(r)] == 1}})
                                .dump());
    }
    const double rate = static_cast<double>(hits) / spec.n_reps;
    agg["per_T"].push_back({{"T", T}, {"tol", tol}, {"success_rate", rate}});
    const double want = threshold_or(spec, "success_rate_min", 0.95);
    rep.verdicts.push_back(
        {"pivot_similarity_rate_at_T" + std::to_string(T), rate, want, ">=", rate >= want});
  }
  rep.aggregates_json = agg.dump();
  finish_report(rep);
  return rep;
}

ExperimentReport run_experiment(const ExperimentSpec& spec, int threads) {
  if (spec.name == "consistency" || spec.name == "robust_zero")
    return run_consistency(spec, threads);
  if (spec.name == "normality") return run_normality(spec, threads);
  if (spec.name == "bound_validation") return run_bound_validation(spec, threads);
  if (spec.name == "pivot_invariance") return run_pivot_invariance(spec, threads);
  raise(errc::invalid_input, "unknown experiment '" + spec.name + "'");
}

// ---------------------------------------------------------------------------
// Built-in recipes

namespace {

Matrix kernel_running_d3() {
  Matrix K = Matrix::Constant(3, 3, 0.2);
  K.diagonal().setConstant(0.5);
  return K;
}

Matrix kernel_mixed_d4() {
  Matrix K = Matrix::Constant(4, 4, 0.15);
  K.diagonal().setConstant(0.5);
  const SignPattern D({1, -1, 1, -1});
  return d_conjugate_matrix(K, D);
}

Matrix kernel_zero24_d4() {
  Matrix K = Matrix::Constant(4, 4, 0.15);
  K.diagonal().setConstant(0.5);
  K(1, 3) = K(3, 1) = 0.0;
  return K;
}

}  // namespace

std::vector<std::string> default_recipes() {
  return {"consistency", "robust_zero", "normality", "bound_validation", "pivot_invariance"};
}

ExperimentSpec default_spec(const std::string& recipe) {
  ExperimentSpec spec;
  spec.name = recipe;
  spec.seed = 42;
  spec.pivot = 1;
  if (recipe == "consistency") {
    spec.truth = kernel_mixed_d4();
    spec.T_grid = {1000, 10000, 100000};
    spec.n_reps = 100;
    spec.regime = Regime::strict;
    spec.thresholds = {{"sign_rate_min", 0.99}};
  } else if (recipe == "robust_zero") {
    spec.truth = kernel_zero24_d4();
    spec.T_grid = {100000};
    spec.n_reps = 2000;
    spec.regime = Regime::robust;
    spec.thresholds = {{"clip_i", 2}, {"clip_j", 4}, {"clip_freq_lo", 0.45},
                       {"clip_freq_hi", 0.55}};
  } else if (recipe == "normality") {
    spec.truth = kernel_running_d3();
    spec.T_grid = {50000};
    spec.n_reps = 2000;
    spec.regime = Regime::strict;
    spec.thresholds = {{"z_mean_abs_max", 0.1},
                       {"z_var_lo", 0.85},
                       {"z_var_hi", 1.15},
                       {"cov_rel_max", 0.15}};
  } else if (recipe == "bound_validation") {
    spec.truth = kernel_running_d3();
    spec.T_grid = {1000, 10000};
    spec.n_reps = 2000;
    spec.regime = Regime::strict;
    spec.epsilon = 0.1;
    spec.eta_method = EtaMethod::lipschitz;
    spec.thresholds = {{"delta", 0.05}};
  } else if (recipe == "pivot_invariance") {
    spec.truth = kernel_mixed_d4();
    spec.T_grid = {10000};
    spec.n_reps = 200;
    spec.regime = Regime::strict;
    spec.thresholds = {{"success_rate_min", 0.95}};
  } else {
    raise(errc::invalid_input, "unknown recipe '" + recipe + "'");
  }
  return spec;
}

}  // namespace dpp
