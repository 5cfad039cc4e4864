#include "dpplab/cli.hpp"

#include <Eigen/Eigenvalues>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dpplab/bounds.hpp"
#include "dpplab/constrained.hpp"
#include "dpplab/estimator.hpp"
#include "dpplab/exact.hpp"
#include "dpplab/experiments.hpp"
#include "dpplab/io.hpp"
#include "dpplab/sampler.hpp"
#include "dpplab/threads.hpp"
#include "json.hpp"

namespace dpp {

namespace {

// Stable exit-code contract: 0 success, 2 input/validation, 3 estimation,
// 4 fitting, 5 bounds, 6 verdict failure.
int exit_code_for(errc c) {
  switch (c) {
    case errc::invalid_input:
    case errc::io_error:
    case errc::not_symmetric:
    case errc::spectrum_out_of_range:
    case errc::numerical_singularity:
    case errc::zero_in_pivot_row:
    case errc::refuse_large_d:
      return 2;
    case errc::empty_sample:
    case errc::negative_cov_argument:
    case errc::zero_sign_argument:
    case errc::assumption_violated:
    case errc::ambiguous_sign:
      return 3;
    case errc::no_admissible_start:
      return 4;
    case errc::derivative_guard:
    case errc::non_positive_eta:
    case errc::invalid_eta:
    case errc::non_decaying_bound:
    case errc::t_too_small:
      return 5;
  }
  return 1;
}

int parse_pivot(const std::string& pivot_arg, const SampleMatrix& X) {
  if (pivot_arg == "auto") return auto_pivot(X);
  try {
    return std::stoi(pivot_arg);
  } catch (const std::exception&) {
    raise(errc::invalid_input, "--pivot must be an index or 'auto'");
  }
}

Regime parse_regime(const std::string& r) {
  if (r == "strict") return Regime::strict;
  if (r == "robust") return Regime::robust;
  raise(errc::invalid_input, "--regime must be strict or robust");
}

nlohmann::json matrix_json(const Matrix& M) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(M.rows()));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) rows[i].push_back(M(i, j));
  return nlohmann::json(rows);
}

// Pseudo-inverse of the asymptotic covariance for the efficient weighting.
Matrix pseudo_inverse_spd(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A);
  const double cap = es.eigenvalues().cwiseAbs().maxCoeff();
  Vector inv = es.eigenvalues();
  for (Eigen::Index k = 0; k < inv.size(); ++k)
    inv[k] = inv[k] > 1e-10 * cap ? 1.0 / inv[k] : 0.0;
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

struct Options {
  std::string kernel_path, data_path, out_path, estimate_path, moments_path, spec_path, recipe;
  std::string pivot = "1";
  std::string regime = "strict";
  std::string family, omega = "identity", eta_method = "lipschitz", exponent = "kl-eta";
  std::string fit_case = "auto";
  std::string format = "csv";
  std::uint64_t seed = 0, stream = 0;
  long T = 0;
  double epsilon = 0.0, delta = 0.05;
  int threads = 0;
  bool with_covariance = false, with_projection = false;
};

int cmd_simulate(const Options& o) {
  const CorrelationKernel K = validate_kernel(read_matrix_auto(o.kernel_path));
  const SampleMatrix X = sample_dpp(K, o.T, {o.seed, o.stream});
  if (o.format == "bin")
    write_samples_bin(X, o.out_path);
  else
    write_samples_csv(X, o.out_path);
  nlohmann::json j = {{"d", K.dim()},     {"T", o.T},
                      {"seed", o.seed},   {"stream", o.stream},
                      {"out", o.out_path}, {"format", o.format},
                      {"clamp_events", X.clamp_events}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_estimate(const Options& o) {
  const SampleMatrix X = read_samples_auto(o.data_path);
  const int pivot = parse_pivot(o.pivot, X);
  const Regime regime = parse_regime(o.regime);
  const MomentVector pi = sample_moments(X, pivot);
  EstimatedKernel est;
  try {
    est = regime == Regime::strict ? recover_from_moments(pi) : recover_robust(pi);
  } catch (const Error& e) {
    if (e.code() == errc::negative_cov_argument) {
      std::string msg = e.what();
      const auto pos = msg.find(": ");
      if (pos != std::string::npos) msg = msg.substr(pos + 2);
      raise(e.code(), msg + "; consider --regime robust");
    }
    throw;
  }
  nlohmann::json j = nlohmann::json::parse(est.to_json_string());
  if (o.with_covariance) {
    const AsymptoticCovariance cov = asymptotic_covariance(pi, X.rows());
    j["asymptotic_covariance"] = matrix_json(cov.matrix);
  }
  if (o.with_projection)
    j["projected_kernel"] = matrix_json(project_to_valid(est.kernel).matrix());
  const std::string text = j.dump(2);
  if (!o.out_path.empty()) write_text_file(o.out_path, text);
  std::cout << text << "\n";
  return 0;
}

int cmd_fit(const Options& o) {
  if (o.data_path.empty() == o.estimate_path.empty())
    raise(errc::invalid_input, "provide exactly one of --data or --estimate");
  if (o.family.empty()) raise(errc::invalid_input, "--family is required");

  Matrix K_hat;
  MomentVector* pi_ptr = nullptr;
  MomentVector pi(2, 1, Vector::Zero(3), false);
  long T = 0;
  if (!o.data_path.empty()) {
    const SampleMatrix X = read_samples_auto(o.data_path);
    const int pivot = parse_pivot(o.pivot, X);
    pi = sample_moments(X, pivot);
    pi_ptr = &pi;
    T = X.rows();
    const EstimatedKernel est = parse_regime(o.regime) == Regime::strict
                                    ? recover_from_moments(pi)
                                    : recover_robust(pi);
    K_hat = est.kernel;
  } else {
    K_hat = EstimatedKernel::from_json_string(read_text_file(o.estimate_path)).kernel;
  }
  const int d = static_cast<int>(K_hat.rows());

  const ParametricFamily fam = o.family == "equicovariance" ? family_equicovariance(d)
                               : o.family == "toeplitz"
                                   ? family_toeplitz(d)
                                   : throw Error(errc::invalid_input,
                                                 "unknown family '" + o.family + "'");

  Matrix Omega;
  if (o.omega == "identity") {
    Omega = identity_omega(d);
  } else if (o.omega == "efficient") {
    if (pi_ptr == nullptr)
      raise(errc::invalid_input, "--omega efficient needs --data (moments are required)");
    Omega = pseudo_inverse_spd(asymptotic_covariance(*pi_ptr, T).matrix);
  } else {
    raise(errc::invalid_input, "--omega must be identity or efficient");
  }

  int which = 0;
  if (o.fit_case == "1")
    which = 1;
  else if (o.fit_case == "2")
    which = 2;
  else if (o.fit_case == "auto")
    which = fam.d_closure ? 1 : 2;
  else
    raise(errc::invalid_input, "--case must be 1, 2 or auto");

  const FitResult fit = which == 1 ? fit_case1(K_hat, fam, Omega) : fit_case2(K_hat, fam, Omega);
  nlohmann::json j = nlohmann::json::parse(fit.to_json_string());
  j["family"] = fam.name;
  j["case"] = which;
  j["omega"] = o.omega;
  const std::string text = j.dump(2);
  if (!o.out_path.empty()) write_text_file(o.out_path, text);
  std::cout << text << "\n";
  return 0;
}

int cmd_bound(const Options& o) {
  if (o.kernel_path.empty() == o.moments_path.empty())
    raise(errc::invalid_input, "provide exactly one of --kernel or --moments");
  if (!(o.epsilon > 0.0)) raise(errc::invalid_input, "--epsilon must be positive");
  if (o.T < 1) raise(errc::invalid_input, "--T must be >= 1");

  int pivot = 1;
  try {
    pivot = std::stoi(o.pivot);
  } catch (const std::exception&) {
    raise(errc::invalid_input, "--pivot must be an index for bound");
  }
  const MomentVector pi0 =
      !o.kernel_path.empty()
          ? exact_moment_vector(validate_kernel(read_matrix_auto(o.kernel_path)), pivot)
          : moments_from_csv(read_text_file(o.moments_path));

  const EtaMethod method =
      o.eta_method == "bisection" ? EtaMethod::bisection : EtaMethod::lipschitz;
  const LdExponent mode =
      o.exponent == "kl-two-sided" ? LdExponent::kl_two_sided : LdExponent::kl_eta;
  const EtaCertificate cert = eta_modulus(pi0, o.epsilon, method, 512, o.seed);
  const BoundInputs in{pi0, o.epsilon, cert.eta, o.T};
  const BoundValue ld = ld_bound(in, mode);
  const BoundValue hf = hoeffding_bound(in);

  nlohmann::json j;
  j["epsilon"] = o.epsilon;
  j["eta"] = cert.eta;
  j["method"] = eta_method_name(method);
  j["exponent"] = o.exponent;
  j["T"] = o.T;
  j["ld_bound_raw"] = ld.raw;
  j["ld_bound"] = ld.clamped;
  j["hoeffding_raw"] = hf.raw;
  j["hoeffding"] = hf.clamped;
  j["delta"] = o.delta;
  j["T_star_ld"] = sample_complexity(pi0, cert.eta, o.delta, BoundKind::ld, mode);
  j["T_star_hoeffding"] = sample_complexity(pi0, cert.eta, o.delta, BoundKind::hoeffding, mode);
  j["certificate"] = {{"probes", cert.probes},
                      {"max_deviation", cert.max_deviation},
                      {"lipschitz_linf", std::isnan(cert.lipschitz_linf)
                                             ? nlohmann::json()
                                             : nlohmann::json(cert.lipschitz_linf)}};
  const std::string text = j.dump(2);
  if (!o.out_path.empty()) write_text_file(o.out_path, text);
  std::cout << text << "\n";
  return 0;
}

int cmd_oracle(const Options& o) {
  const CorrelationKernel K = validate_kernel(read_matrix_auto(o.kernel_path));
  int pivot = 1;
  try {
    pivot = std::stoi(o.pivot);
  } catch (const std::exception&) {
    raise(errc::invalid_input, "--pivot must be an index for oracle");
  }
  const Regime regime = parse_regime(o.regime);
  constexpr double tol = 1e-10;

  const ReconstructionReport rec = verify_minor_reconstruction(K, pivot, regime, tol);
  const MomentVector pi0 = exact_moment_vector(K, pivot);
  const EstimatedKernel est =
      regime == Regime::strict ? recover_from_moments(pi0) : recover_robust(pi0);
  const Matrix Kstar = canonicalize(K, pivot).first.matrix();
  const double recovery_dev = (est.kernel - Kstar).cwiseAbs().maxCoeff();

  const bool pass = rec.pass && recovery_dev <= tol;
  nlohmann::json j = {{"d", K.dim()},
                      {"pivot", pivot},
                      {"regime", regime_name(regime)},
                      {"minor_max_deviation", rec.max_deviation},
                      {"order4_deviation", std::isnan(rec.order4_deviation)
                                               ? nlohmann::json()
                                               : nlohmann::json(rec.order4_deviation)},
                      {"subsets_checked", rec.subsets_checked},
                      {"recovery_max_deviation", recovery_dev},
                      {"tolerance", tol},
                      {"pass", pass}};
  std::cout << j.dump(2) << "\n";
  return pass ? 0 : 6;
}

int cmd_experiment(const Options& o) {
  if (o.spec_path.empty() == o.recipe.empty())
    raise(errc::invalid_input, "provide exactly one of --spec or --recipe");
  ExperimentSpec spec = !o.spec_path.empty()
                            ? ExperimentSpec::from_json_string(read_text_file(o.spec_path))
                            : default_spec(o.recipe);
  if (o.seed != 0) spec.seed = o.seed;
  const int threads = resolve_threads(o.threads);
  const ExperimentReport report = run_experiment(spec, threads);

  if (!o.out_path.empty()) {
    std::filesystem::create_directories(o.out_path);
    write_text_file(o.out_path + "/report.json", report.to_json_string());
    std::ofstream raw(o.out_path + "/records.jsonl");
    if (!raw) raise(errc::io_error, "cannot write records to " + o.out_path);
    for (const auto& line : report.records) raw << line << '\n';
  }
  std::cout << report.to_json_string() << "\n";
  return report.pass ? 0 : 6;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"dpplab: discrete DPP distributions, exact sampling, closed-form moment "
               "estimation, constrained fits and concentration bounds"};
  app.set_config("--config", "", "read defaults from a TOML config file (flags win)");
  app.require_subcommand(1);

  Options o;
  if (const char* env = std::getenv("DPPLAB_THREADS")) o.threads = std::atoi(env);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--threads", o.threads, "worker threads (default DPPLAB_THREADS or cores)");
  };

  CLI::App* sim = app.add_subcommand("simulate", "draw i.i.d. samples from a kernel");
  sim->add_option("--kernel", o.kernel_path, "kernel matrix file (csv or json)")->required();
  sim->add_option("--T", o.T, "number of draws")->required();
  sim->add_option("--out", o.out_path, "output sample file")->required();
  sim->add_option("--stream", o.stream, "stream index within the seed");
  sim->add_option("--format", o.format, "csv|bin")->check(CLI::IsMember({"csv", "bin"}));
  add_common(sim);

  CLI::App* est = app.add_subcommand("estimate", "closed-form kernel estimate from samples");
  est->add_option("--data", o.data_path, "sample file (csv or bin)")->required();
  est->add_option("--pivot", o.pivot, "pivot row index, or 'auto'");
  est->add_option("--regime", o.regime, "strict|robust")
      ->check(CLI::IsMember({"strict", "robust"}));
  est->add_option("--out", o.out_path, "write the estimate JSON here as well");
  est->add_flag("--with-covariance", o.with_covariance, "attach the delta-method covariance");
  est->add_flag("--with-projection", o.with_projection, "attach a spectrally clamped valid kernel");
  add_common(est);

  CLI::App* fit = app.add_subcommand("fit", "two-step parametric family fit");
  fit->add_option("--data", o.data_path, "sample file; estimate is computed first");
  fit->add_option("--estimate", o.estimate_path, "estimate JSON from a previous run");
  fit->add_option("--family", o.family, "equicovariance|toeplitz")->required();
  fit->add_option("--case", o.fit_case, "1|2|auto");
  fit->add_option("--omega", o.omega, "identity|efficient")
      ->check(CLI::IsMember({"identity", "efficient"}));
  fit->add_option("--pivot", o.pivot, "pivot row index, or 'auto'");
  fit->add_option("--regime", o.regime, "strict|robust");
  fit->add_option("--out", o.out_path, "write the fit JSON here as well");
  add_common(fit);

  CLI::App* bnd = app.add_subcommand("bound", "certified eta, tail bounds and sample complexity");
  bnd->add_option("--kernel", o.kernel_path, "true kernel file");
  bnd->add_option("--moments", o.moments_path, "true moment vector CSV");
  bnd->add_option("--epsilon", o.epsilon, "accuracy target")->required();
  bnd->add_option("--delta", o.delta, "failure probability for sample complexity");
  bnd->add_option("--T", o.T, "sample size at which to evaluate the bounds")->required();
  bnd->add_option("--eta-method", o.eta_method, "lipschitz|bisection")
      ->check(CLI::IsMember({"lipschitz", "bisection"}));
  bnd->add_option("--exponent", o.exponent,
                  "kl-eta|kl-two-sided large-deviation exponent (kl-two-sided is the "
                  "labeled two-sided Chernoff comparison)")
      ->check(CLI::IsMember({"kl-eta", "kl-two-sided"}));
  bnd->add_option("--pivot", o.pivot, "pivot row index");
  bnd->add_option("--out", o.out_path, "write the bound JSON here as well");
  add_common(bnd);

  CLI::App* orc = app.add_subcommand("oracle", "exact reconstruction checks on a known kernel");
  orc->add_option("--kernel", o.kernel_path, "kernel matrix file")->required();
  orc->add_option("--pivot", o.pivot, "pivot row index");
  orc->add_option("--regime", o.regime, "strict|robust");
  add_common(orc);

  CLI::App* exp = app.add_subcommand("experiment", "run a Monte Carlo recipe");
  exp->add_option("--spec", o.spec_path, "experiment spec JSON file");
  exp->add_option("--recipe", o.recipe,
                  "built-in recipe: consistency|robust_zero|normality|bound_validation|"
                  "pivot_invariance");
  exp->add_option("--out", o.out_path, "directory for report.json and records.jsonl");
  add_common(exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(sim)) return cmd_simulate(o);
    if (app.got_subcommand(est)) return cmd_estimate(o);
    if (app.got_subcommand(fit)) return cmd_fit(o);
    if (app.got_subcommand(bnd)) return cmd_bound(o);
    if (app.got_subcommand(orc)) return cmd_oracle(o);
    if (app.got_subcommand(exp)) return cmd_experiment(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace dpp
