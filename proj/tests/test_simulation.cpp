#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "json.hpp"

#include "graphtest/rng.hpp"
#include "graphtest/simulation.hpp"

using namespace graphtest;

namespace {

template <class Fn>
errc error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a graphtest::Error");
  return errc::invalid_argument;
}

ScenarioSpec tiny_scenario() {
  ScenarioSpec spec;
  spec.m = 20;
  spec.n = 20;
  spec.d = 5;
  spec.shift = 0.0;
  spec.graph = parse_graph_spec("kmst:2");
  spec.trials = 30;
  spec.seed = 12;
  return spec;
}

}  // namespace

TEST_CASE("scenario json round trips every field") {
  ScenarioSpec spec;
  spec.m = 60;
  spec.n = 110;
  spec.d = 12;
  spec.shift = 0.9;
  spec.family = SampleFamily::t5;
  spec.graph = parse_graph_spec("knn:4");
  spec.ks = {1, 3, 5};
  spec.statistics = {StatisticKind::weighted, StatisticKind::maxtype};
  spec.trials = 321;
  spec.alpha = 0.01;
  spec.seed = 777;
  spec.permutation_pvalues = true;
  spec.n_permutations = 512;
  spec.parallel = true;
  spec.threads = 2;

  ScenarioSpec back = scenario_from_json_text(scenario_to_json_text(spec));
  CHECK(back.m == spec.m);
  CHECK(back.n == spec.n);
  CHECK(back.d == spec.d);
  CHECK(back.shift == spec.shift);
  CHECK(back.family == spec.family);
  CHECK(back.graph.kind == GraphKind::knn);
  CHECK(back.graph.k == 4);
  CHECK(back.ks == spec.ks);
  CHECK(back.statistics == spec.statistics);
  CHECK(back.trials == spec.trials);
  CHECK(back.alpha == spec.alpha);
  CHECK(back.seed == spec.seed);
  CHECK(back.permutation_pvalues == spec.permutation_pvalues);
  CHECK(back.n_permutations == spec.n_permutations);
  CHECK(back.parallel == spec.parallel);
  CHECK(back.threads == spec.threads);
}

TEST_CASE("scenario json accepts partial objects and rejects unknown keys") {
  ScenarioSpec defaults = scenario_from_json_text("{\"m\": 33}");
  CHECK(defaults.m == 33);
  CHECK(defaults.n == 50);
  CHECK(defaults.family == SampleFamily::gaussian);

  CHECK(error_code_of([] { scenario_from_json_text("{\"shfit\": 1.0}"); }) == errc::parse_error);
  CHECK(error_code_of([] { scenario_from_json_text("not json"); }) == errc::parse_error);
  // structurally valid JSON with a bad value is an argument problem
  CHECK(error_code_of([] { scenario_from_json_text("{\"family\": \"cauchy\"}"); }) ==
        errc::invalid_argument);
}

TEST_CASE("gaussian shift lands on the first coordinate of sample 2") {
  Rng rng(50);
  SampleDraw draw = sample_gaussian_shift(400, 400, 3, 2.0, rng);
  CHECK(draw.data.rows == 800);
  CHECK(draw.data.cols == 3);
  CHECK(draw.layout.m == 400);
  CHECK(draw.layout.n == 400);
  double mean1 = 0.0, mean2 = 0.0, other = 0.0;
  for (int i = 0; i < 400; ++i) mean1 += draw.data.at(i, 0);
  for (int i = 400; i < 800; ++i) {
    mean2 += draw.data.at(i, 0);
    other += draw.data.at(i, 1);
  }
  mean1 /= 400;
  mean2 /= 400;
  other /= 400;
  CHECK(mean2 - mean1 == doctest::Approx(2.0).epsilon(0.2));
  CHECK(other == doctest::Approx(0.0).scale(1.0).epsilon(0.3));
}

TEST_CASE("t sampling validates the dof") {
  Rng rng(51);
  SampleDraw draw = sample_t_product(30, 40, 6, 1.0, /*dof=*/5, rng);
  CHECK(draw.data.rows == 70);
  CHECK(draw.data.cols == 6);
  CHECK(error_code_of([&] { sample_t_product(30, 40, 6, 1.0, 7, rng); }) ==
        errc::invalid_argument);
}

TEST_CASE("power study is reproducible and thread-count invariant") {
  ScenarioSpec spec = tiny_scenario();
  spec.ks = {1, 2};
  PowerReport first = run_power_study(spec);
  PowerReport second = run_power_study(spec);
  REQUIRE(first.cells.size() == second.cells.size());
  REQUIRE(first.cells.size() == 2 * all_statistics().size());
  for (std::size_t i = 0; i < first.cells.size(); ++i) {
    CHECK(first.cells[i].power == second.cells[i].power);
    CHECK(first.cells[i].std_error == second.cells[i].std_error);
    CHECK(first.cells[i].trials == spec.trials);
  }

  ScenarioSpec threaded = spec;
  threaded.parallel = true;
  threaded.threads = 3;
  PowerReport third = run_power_study(threaded);
  for (std::size_t i = 0; i < first.cells.size(); ++i) {
    CHECK(first.cells[i].power == third.cells[i].power);
    CHECK(first.cells[i].k == third.cells[i].k);
    CHECK(first.cells[i].statistic == third.cells[i].statistic);
  }
}

TEST_CASE("permutation-based power study is also deterministic") {
  ScenarioSpec spec = tiny_scenario();
  spec.trials = 25;
  spec.permutation_pvalues = true;
  spec.n_permutations = 99;
  spec.statistics = {StatisticKind::edge, StatisticKind::weighted};
  PowerReport serial = run_power_study(spec);
  ScenarioSpec par = spec;
  par.parallel = true;
  par.threads = 2;
  PowerReport threaded = run_power_study(par);
  REQUIRE(serial.cells.size() == threaded.cells.size());
  for (std::size_t i = 0; i < serial.cells.size(); ++i) {
    CHECK(serial.cells[i].power == threaded.cells[i].power);
  }
}

TEST_CASE("a large shift dominates the null in power") {
  ScenarioSpec null_spec = tiny_scenario();
  null_spec.trials = 60;
  null_spec.statistics = {StatisticKind::weighted};
  ScenarioSpec shifted = null_spec;
  shifted.shift = 3.0;
  double power_null = run_power_study(null_spec).cells[0].power;
  double power_shift = run_power_study(shifted).cells[0].power;
  CHECK(power_shift > 0.9);
  CHECK(power_null < 0.4);
}

TEST_CASE("simulations refuse external graphs") {
  ScenarioSpec spec = tiny_scenario();
  spec.graph = GraphSpec{GraphKind::external, 1, "edges.txt"};
  CHECK(error_code_of([&] { run_power_study(spec); }) == errc::invalid_argument);
}

TEST_CASE("power report formats") {
  ScenarioSpec spec = tiny_scenario();
  spec.trials = 10;
  spec.ks = {1, 2};
  spec.statistics = {StatisticKind::edge, StatisticKind::weighted};
  PowerReport report = run_power_study(spec);

  std::string csv = power_report_csv(report);
  CHECK(csv.rfind("k,statistic,power,stderr,trials\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find("1,edge,") != std::string::npos);
  CHECK(csv.find("2,weighted,") != std::string::npos);

  auto doc = nlohmann::json::parse(power_report_json(report));
  CHECK(doc["scenario"]["m"] == 20);
  REQUIRE(doc["cells"].is_array());
  REQUIRE(doc["cells"].size() == 4);
  CHECK(doc["cells"][0]["k"] == 1);
  CHECK(doc["cells"][0]["statistic"] == "edge");
  CHECK(doc["cells"][3]["statistic"] == "weighted");
  CHECK(doc["cells"][3]["trials"] == 10);
}

TEST_CASE("variance boosting experiment reports inflated sds") {
  BoostingSpec spec;
  spec.m = 12;
  spec.n_initial = 12;
  spec.n_added = 12;
  spec.d = 8;
  spec.shift = 1.0;
  spec.graph = parse_graph_spec("kmst:2");
  spec.trials = 8;
  spec.seed = 5;
  BoostingReport report = variance_boosting_experiment(spec);
  REQUIRE(report.sd_initial.size() == 8);
  REQUIRE(report.sd_augmented.size() == 8);
  REQUIRE(report.gap_initial.size() == 8);
  REQUIRE(report.z_initial.size() == 8);
  for (double sd : report.sd_initial) CHECK(sd > 0.0);
  for (double sd : report.sd_augmented) CHECK(sd > 0.0);
  CHECK(report.mean_sd_ratio() > 1.0);

  BoostingReport again = variance_boosting_experiment(spec);
  CHECK(report.mean_sd_ratio() == again.mean_sd_ratio());
  CHECK(report.mean_gap_change() == again.mean_gap_change());
}

TEST_CASE("p-value accuracy study ignores the configured shift") {
  ScenarioSpec spec = tiny_scenario();
  spec.trials = 20;
  spec.permutation_pvalues = true;
  spec.n_permutations = 199;
  spec.statistics = {StatisticKind::weighted};
  AccuracyReport report = pvalue_accuracy_study(spec);
  REQUIRE(report.p_asym.size() == 20);
  REQUIRE(report.p_perm.size() == 20);
  for (double p : report.p_asym) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  for (double p : report.p_perm) {
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
  }
  CHECK(report.median_abs_diff() <= report.q95_abs_diff());

  ScenarioSpec shifted = spec;
  shifted.shift = 5.0;
  AccuracyReport same = pvalue_accuracy_study(shifted);
  CHECK(same.p_asym == report.p_asym);
  CHECK(same.p_perm == report.p_perm);
}

TEST_CASE("accuracy report quantiles use the nearest rank") {
  AccuracyReport report;
  report.p_asym = {0.1, 0.2, 0.3, 0.4};
  report.p_perm = {0.0, 0.0, 0.0, 0.0};
  CHECK(report.median_abs_diff() == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(report.q95_abs_diff() == doctest::Approx(0.4).epsilon(1e-14));

  std::string csv = accuracy_report_csv(report);
  CHECK(csv.rfind("p_asym,p_perm\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  auto doc = nlohmann::json::parse(accuracy_report_json(report));
  CHECK(doc["trials"] == 4);
  CHECK(doc["median_abs_diff"] == doctest::Approx(0.2));
  CHECK(doc["q95_abs_diff"] == doctest::Approx(0.4));
  REQUIRE(doc["pairs"].is_array());
  CHECK(doc["pairs"].size() == 4);
}
