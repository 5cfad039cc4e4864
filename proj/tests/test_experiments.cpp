#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>

#include "doctest.h"
#include "dpplab/experiments.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace dpp;
using nlohmann::json;

namespace {

ExperimentSpec tiny_consistency() {
  ExperimentSpec spec = default_spec("consistency");
  spec.T_grid = {400, 4000};
  spec.n_reps = 20;
  spec.seed = 9001;
  return spec;
}

}  // namespace

TEST_CASE("records are byte-identical across runs and worker counts") {
  const ExperimentSpec spec = tiny_consistency();
  const ExperimentReport a = run_consistency(spec, 1);
  const ExperimentReport b = run_consistency(spec, 1);
  const ExperimentReport c = run_consistency(spec, 3);
  CHECK(a.records == b.records);
  CHECK(a.records == c.records);
  CHECK(a.aggregates_json == c.aggregates_json);
  CHECK(a.to_json_string() == c.to_json_string());
  CHECK(a.records.size() == 40);
}

TEST_CASE("consistency report carries medians, rates and verdicts") {
  const ExperimentReport rep = run_consistency(tiny_consistency(), 1);
  const json agg = json::parse(rep.aggregates_json);
  REQUIRE(agg.at("per_T").size() == 2);
  CHECK(agg["per_T"][0]["median_max_abs_error"].get<double>() >
        agg["per_T"][1]["median_max_abs_error"].get<double>());
  CHECK(agg["per_T"][1]["sign_rate"].get<double>() >= 0.9);
  bool found = false;
  for (const auto& v : rep.verdicts)
    if (v.name == "median_max_abs_error_strictly_decreasing") found = true;
  CHECK(found);
}

TEST_CASE("robust recipe reports clip frequencies at the designated entry") {
  ExperimentSpec spec = default_spec("robust_zero");
  spec.n_reps = 200;
  spec.T_grid = {20000};
  spec.seed = 77;
  const ExperimentReport rep = run_consistency(spec, 1);
  const json agg = json::parse(rep.aggregates_json);
  const double freq = agg["per_T"][0]["clip_frequency_at_target"].get<double>();
  CHECK(freq > 0.2);
  CHECK(freq < 0.8);
  CHECK(json::parse(rep.records.front()).contains("clip_count"));
}

TEST_CASE("normality report shape") {
  ExperimentSpec spec = default_spec("normality");
  spec.n_reps = 150;
  spec.T_grid = {20000};
  spec.seed = 5;
  const ExperimentReport rep = run_normality(spec, 1);
  const json agg = json::parse(rep.aggregates_json);
  CHECK(agg["per_entry"].size() == 6);
  CHECK(std::abs(agg["max_abs_mean_z"].get<double>()) < 0.5);
  CHECK(agg["min_var_z"].get<double>() > 0.4);
  CHECK(agg["max_var_z"].get<double>() < 2.0);
  REQUIRE(rep.verdicts.size() == 4);
}

TEST_CASE("bound validation report shape") {
  ExperimentSpec spec = default_spec("bound_validation");
  spec.n_reps = 100;
  spec.T_grid = {2000};
  spec.seed = 6;
  const ExperimentReport rep = run_bound_validation(spec, 1);
  const json agg = json::parse(rep.aggregates_json);
  CHECK(agg["eta"].get<double>() > 0.0);
  CHECK(agg["per_T"][0].contains("ld_bound_raw"));
  CHECK(agg.contains("T_star_ld"));
  bool has_validity = false;
  for (const auto& v : rep.verdicts)
    if (v.name.rfind("empirical_leq_ld", 0) == 0) has_validity = true;
  CHECK(has_validity);
}

TEST_CASE("pivot invariance at desk scale succeeds for every replication") {
  ExperimentSpec spec = default_spec("pivot_invariance");
  spec.n_reps = 50;
  spec.seed = 8;
  const ExperimentReport rep = run_pivot_invariance(spec, 1);
  const json agg = json::parse(rep.aggregates_json);
  CHECK(agg["per_T"][0]["success_rate"].get<double>() == 1.0);
  CHECK(rep.pass);
}

TEST_CASE("spec JSON round trip, including family truths") {
  ExperimentSpec spec = default_spec("consistency");
  const ExperimentSpec back = ExperimentSpec::from_json_string(spec.to_json_string());
  CHECK(back.name == spec.name);
  CHECK(back.T_grid == spec.T_grid);
  CHECK(back.seed == spec.seed);
  CHECK((back.truth - spec.truth).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.thresholds == spec.thresholds);

  const std::string family_spec = R"({
    "name": "consistency",
    "truth": {"family": "equicovariance", "theta": [0.70710678, 0.2], "d": 3},
    "T_grid": [500], "n_reps": 5, "pivot": 1, "regime": "strict", "seed": 1
  })";
  const ExperimentSpec fs = ExperimentSpec::from_json_string(family_spec);
  CHECK(fs.truth(0, 0) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(fs.truth(0, 1) == doctest::Approx(0.1).epsilon(1e-7));

  CHECK_THROWS_AS(ExperimentSpec::from_json_string("{\"name\":\"x\"}"), Error);
  ExperimentSpec badgrid = default_spec("consistency");
  badgrid.T_grid = {100, 100};
  CHECK_THROWS_AS(ExperimentSpec::from_json_string(badgrid.to_json_string()), Error);
}

TEST_CASE("report JSON carries the environment stamp") {
  ExperimentSpec spec = default_spec("pivot_invariance");
  spec.n_reps = 5;
  spec.T_grid = {500};
  const ExperimentReport rep = run_experiment(spec, 1);
  const json j = json::parse(rep.to_json_string());
  CHECK(j["environment"]["generator"] == "philox4x32-10/v1");
  CHECK(j["environment"].contains("version"));
  CHECK(j["n_records"] == 5);
  CHECK(j.contains("verdicts"));
}

TEST_CASE("unknown recipes and experiment names are rejected") {
  CHECK_THROWS_AS(default_spec("nope"), Error);
  ExperimentSpec spec = default_spec("consistency");
  spec.name = "mystery";
  CHECK_THROWS_AS(run_experiment(spec, 1), Error);
}
