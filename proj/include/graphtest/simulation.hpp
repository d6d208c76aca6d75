#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphtest/builders.hpp"
#include "graphtest/distances.hpp"
#include "graphtest/inference.hpp"
#include "graphtest/rng.hpp"

namespace graphtest {

enum class SampleFamily { gaussian, t10, t5 };

const char* sample_family_name(SampleFamily family);

// One synthetic two-sample experiment: sample 1 is m draws from the base
// distribution, sample 2 is n draws with the mean shifted by `shift` along
// the first coordinate (any direction is equivalent by symmetry).
struct ScenarioSpec {
  int m = 50;
  int n = 50;
  int d = 50;
  double shift = 0.0;
  SampleFamily family = SampleFamily::gaussian;
  GraphSpec graph{GraphKind::kmst, 5, {}};
  std::vector<int> ks;  // optional k sweep; empty means {graph.k}
  std::vector<StatisticKind> statistics = all_statistics();
  int trials = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  bool permutation_pvalues = false;  // default asymptotic, for speed
  int n_permutations = 1000;
  bool parallel = false;
  int threads = 0;
};

ScenarioSpec scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const ScenarioSpec& spec);

struct SampleDraw {
  VectorDataset data;
  TwoSampleLayout layout;
};

SampleDraw sample_gaussian_shift(int m, int n, int d, double shift, Rng& rng);
SampleDraw sample_t_product(int m, int n, int d, double shift, int dof, Rng& rng);

// Rejection fraction per (k, statistic) with its Monte Carlo standard
// error. Trial t draws data from substream(seed, t); reruns with the same
// spec are bit-identical regardless of thread count.
struct PowerCell {
  int k = 0;
  StatisticKind statistic = StatisticKind::edge;
  double power = 0.0;
  double std_error = 0.0;
  int trials = 0;
};

struct PowerReport {
  std::vector<PowerCell> cells;
  ScenarioSpec scenario;
};

PowerReport run_power_study(const ScenarioSpec& spec);

std::string power_report_csv(const PowerReport& report);
std::string power_report_json(const PowerReport& report);

// Unequal-sample-size variance study: per trial, build the graph on
// m + n_initial points, record E(R) - R, sd(R) and the z-score of R, then
// append n_added more sample-2 points to the same draw, rebuild, record
// again.
struct BoostingSpec {
  int m = 50;
  int n_initial = 50;
  int n_added = 50;
  int d = 50;
  double shift = 1.3;
  SampleFamily family = SampleFamily::gaussian;
  GraphSpec graph{GraphKind::kmst, 5, {}};
  int trials = 100;
  std::uint64_t seed = 0;
  bool parallel = false;
  int threads = 0;
};

struct BoostingReport {
  std::vector<double> gap_initial;    // E(R) - R on m + n_initial points
  std::vector<double> gap_augmented;  // same after appending n_added
  std::vector<double> sd_initial;
  std::vector<double> sd_augmented;
  std::vector<double> z_initial;  // (R - E(R))/sd(R)
  std::vector<double> z_augmented;

  double mean_sd_ratio() const;
  double mean_gap_change() const;
};

BoostingReport variance_boosting_experiment(const BoostingSpec& spec);

// Null-data comparison of the asymptotic and permutation p-values of the
// first statistic in spec.statistics; spec shift is ignored (forced to 0).
struct AccuracyReport {
  std::vector<double> p_asym;
  std::vector<double> p_perm;

  double median_abs_diff() const;
  double q95_abs_diff() const;
};

AccuracyReport pvalue_accuracy_study(const ScenarioSpec& spec);

std::string accuracy_report_csv(const AccuracyReport& report);
std::string accuracy_report_json(const AccuracyReport& report);

}  // namespace graphtest
