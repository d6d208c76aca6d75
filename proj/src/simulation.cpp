#include "graphtest/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "graphtest/parallel.hpp"
#include "json.hpp"

namespace graphtest {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_graph_spec(const GraphSpec& spec) {
  if (spec.kind == GraphKind::external) return "external:" + spec.path;
  return std::string(graph_kind_name(spec.kind)) + ":" + std::to_string(spec.k);
}

SampleFamily family_from_name(const std::string& name) {
  if (name == "gaussian") return SampleFamily::gaussian;
  if (name == "t10") return SampleFamily::t10;
  if (name == "t5") return SampleFamily::t5;
  fail(errc::invalid_argument, "unknown sample family '" + name + "'");
}

double draw_one(SampleFamily family, Rng& rng) {
  switch (family) {
    case SampleFamily::gaussian: return rng.normal();
    case SampleFamily::t10: return rng.student_t(10);
    case SampleFamily::t5: return rng.student_t(5);
  }
  fail(errc::invalid_argument, "unknown sample family");
}

// m base rows then n rows with the first coordinate shifted.
VectorDataset draw_shifted(int m, int n, int d, double shift, SampleFamily family, Rng& rng) {
  VectorDataset data;
  data.rows = m + n;
  data.cols = d;
  data.values.resize(static_cast<std::size_t>(data.rows) * d);
  for (int i = 0; i < data.rows; ++i) {
    for (int j = 0; j < d; ++j) data.at(i, j) = draw_one(family, rng);
    if (i >= m) data.at(i, 0) += shift;
  }
  return data;
}

TwoSampleLayout block_layout(int m, int n) {
  std::vector<int> labels(static_cast<std::size_t>(m) + n, 2);
  std::fill(labels.begin(), labels.begin() + m, 1);
  return make_layout(std::move(labels));
}

void check_not_external(const GraphSpec& spec) {
  if (spec.kind == GraphKind::external) {
    fail(errc::invalid_argument,
         "simulations draw fresh data every trial; an external edge list cannot apply");
  }
}

bool kmst_saturated(int k, int node_count) {
  std::int64_t n = node_count;
  return static_cast<std::int64_t>(k) * (n - 1) >= n * (n - 1) / 2;
}

SimilarityGraph complete_graph(int node_count) {
  std::vector<Edge> all;
  all.reserve(static_cast<std::size_t>(node_count) * (node_count - 1) / 2);
  for (int i = 0; i < node_count; ++i) {
    for (int j = i + 1; j < node_count; ++j) all.push_back({i, j});
  }
  return validate_graph(node_count, std::move(all));
}

// One graph per requested k. kmst and kmdp share rounds (the union of the
// first k rounds is the k-graph); knn rebuilds per k.
std::vector<SimilarityGraph> sweep_graphs(const DistanceMatrix& dist, GraphKind kind,
                                          const std::vector<int>& ks) {
  std::vector<SimilarityGraph> graphs;
  graphs.reserve(ks.size());
  if (kind == GraphKind::knn) {
    for (int k : ks) graphs.push_back(build_knn(dist, k));
    return graphs;
  }
  int k_rounds = 0;
  for (int k : ks) {
    if (kind == GraphKind::kmst && kmst_saturated(k, dist.size)) continue;
    k_rounds = std::max(k_rounds, k);
  }
  std::vector<SimilarityGraph> rounds;
  if (k_rounds > 0) {
    rounds = kind == GraphKind::kmst ? kmst_rounds(dist, k_rounds) : kmdp_rounds(dist, k_rounds);
  }
  for (int k : ks) {
    if (kind == GraphKind::kmst && kmst_saturated(k, dist.size)) {
      graphs.push_back(complete_graph(dist.size));
    } else {
      graphs.push_back(merge_rounds(dist.size, rounds, k));
    }
  }
  return graphs;
}

void validate_scenario(const ScenarioSpec& spec) {
  if (spec.m < 2 || spec.n < 2) fail(errc::too_few_nodes, "scenario needs m >= 2 and n >= 2");
  if (spec.d < 1) fail(errc::invalid_argument, "scenario needs d >= 1");
  if (spec.trials < 1) fail(errc::invalid_argument, "scenario needs trials >= 1");
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
    fail(errc::invalid_argument, "alpha must be inside (0, 1)");
  }
  if (spec.statistics.empty()) fail(errc::invalid_argument, "scenario lists no statistics");
  if (spec.n_permutations < 1) fail(errc::invalid_argument, "n_permutations must be >= 1");
  for (int k : spec.ks) {
    if (k < 1) fail(errc::invalid_argument, "every swept k must be >= 1");
  }
  if (spec.graph.kind != GraphKind::external && spec.graph.k < 1) {
    fail(errc::invalid_argument, "graph k must be >= 1");
  }
  check_not_external(spec.graph);
}

std::string csv_num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

const char* sample_family_name(SampleFamily family) {
  switch (family) {
    case SampleFamily::gaussian: return "gaussian";
    case SampleFamily::t10: return "t10";
    case SampleFamily::t5: return "t5";
  }
  return "unknown";
}

SampleDraw sample_gaussian_shift(int m, int n, int d, double shift, Rng& rng) {
  return {draw_shifted(m, n, d, shift, SampleFamily::gaussian, rng), block_layout(m, n)};
}

SampleDraw sample_t_product(int m, int n, int d, double shift, int dof, Rng& rng) {
  SampleFamily family;
  if (dof == 10) {
    family = SampleFamily::t10;
  } else if (dof == 5) {
    family = SampleFamily::t5;
  } else {
    fail(errc::invalid_argument, "supported t degrees of freedom are 5 and 10");
  }
  return {draw_shifted(m, n, d, shift, family, rng), block_layout(m, n)};
}

ScenarioSpec scenario_from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    fail(errc::parse_error, std::string("scenario JSON: ") + e.what());
  }
  if (!j.is_object()) fail(errc::parse_error, "scenario JSON must be an object");
  ScenarioSpec spec;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "m") {
        spec.m = value.get<int>();
      } else if (key == "n") {
        spec.n = value.get<int>();
      } else if (key == "d") {
        spec.d = value.get<int>();
      } else if (key == "shift") {
        spec.shift = value.get<double>();
      } else if (key == "family") {
        spec.family = family_from_name(value.get<std::string>());
      } else if (key == "graph") {
        spec.graph = parse_graph_spec(value.get<std::string>());
      } else if (key == "ks") {
        spec.ks = value.get<std::vector<int>>();
      } else if (key == "statistics") {
        spec.statistics.clear();
        for (const auto& name : value) {
          spec.statistics.push_back(statistic_from_name(name.get<std::string>()));
        }
      } else if (key == "trials") {
        spec.trials = value.get<int>();
      } else if (key == "alpha") {
        spec.alpha = value.get<double>();
      } else if (key == "seed") {
        spec.seed = value.get<std::uint64_t>();
      } else if (key == "permutation_pvalues") {
        spec.permutation_pvalues = value.get<bool>();
      } else if (key == "n_permutations") {
        spec.n_permutations = value.get<int>();
      } else if (key == "parallel") {
        spec.parallel = value.get<bool>();
      } else if (key == "threads") {
        spec.threads = value.get<int>();
      } else {
        fail(errc::parse_error, "unknown scenario field '" + key + "'");
      }
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(errc::parse_error, std::string("scenario JSON: ") + e.what());
  }
  return spec;
}

std::string scenario_to_json_text(const ScenarioSpec& spec) {
  ordered_json j;
  j["m"] = spec.m;
  j["n"] = spec.n;
  j["d"] = spec.d;
  j["shift"] = spec.shift;
  j["family"] = sample_family_name(spec.family);
  j["graph"] = format_graph_spec(spec.graph);
  j["ks"] = spec.ks;
  ordered_json stats = ordered_json::array();
  for (StatisticKind kind : spec.statistics) stats.push_back(statistic_name(kind));
  j["statistics"] = std::move(stats);
  j["trials"] = spec.trials;
  j["alpha"] = spec.alpha;
  j["seed"] = spec.seed;
  j["permutation_pvalues"] = spec.permutation_pvalues;
  j["n_permutations"] = spec.n_permutations;
  j["parallel"] = spec.parallel;
  j["threads"] = spec.threads;
  return j.dump(1);
}

PowerReport run_power_study(const ScenarioSpec& spec) {
  validate_scenario(spec);
  std::vector<int> ks = spec.ks.empty() ? std::vector<int>{spec.graph.k} : spec.ks;
  const int n_ks = static_cast<int>(ks.size());
  const int n_stats = static_cast<int>(spec.statistics.size());
  const TwoSampleLayout layout = block_layout(spec.m, spec.n);

  std::vector<std::uint8_t> reject(
      static_cast<std::size_t>(spec.trials) * n_ks * n_stats, 0);
  int workers = spec.parallel ? resolve_threads(spec.threads) : 1;
  parallel_for(spec.trials, workers, [&](std::int64_t t) {
    std::uint64_t trial_key = substream(spec.seed, static_cast<std::uint64_t>(t));
    Rng rng(substream(trial_key, 0));
    VectorDataset data =
        draw_shifted(spec.m, spec.n, spec.d, spec.shift, spec.family, rng);
    DistanceMatrix dist = euclidean_distances(data);
    std::vector<SimilarityGraph> graphs = sweep_graphs(dist, spec.graph.kind, ks);
    for (int gi = 0; gi < n_ks; ++gi) {
      std::size_t base = (static_cast<std::size_t>(t) * n_ks + gi) * n_stats;
      if (spec.permutation_pvalues) {
        PermutationConfig config;
        config.n_permutations = spec.n_permutations;
        config.seed = substream(trial_key, 1);
        auto results = permutation_pvalues(graphs[gi], layout, spec.statistics, config);
        for (int s = 0; s < n_stats; ++s) {
          reject[base + s] = *results[s].p_permutation <= spec.alpha ? 1 : 0;
        }
      } else {
        for (int s = 0; s < n_stats; ++s) {
          TestResult r = evaluate_statistic(graphs[gi], layout, spec.statistics[s]);
          reject[base + s] = asymptotic_pvalue(r) <= spec.alpha ? 1 : 0;
        }
      }
    }
  });

  PowerReport report;
  report.scenario = spec;
  for (int gi = 0; gi < n_ks; ++gi) {
    for (int s = 0; s < n_stats; ++s) {
      std::int64_t hits = 0;
      for (int t = 0; t < spec.trials; ++t) {
        hits += reject[(static_cast<std::size_t>(t) * n_ks + gi) * n_stats + s];
      }
      PowerCell cell;
      cell.k = ks[gi];
      cell.statistic = spec.statistics[s];
      cell.trials = spec.trials;
      cell.power = static_cast<double>(hits) / spec.trials;
      cell.std_error = std::sqrt(cell.power * (1.0 - cell.power) / spec.trials);
      report.cells.push_back(cell);
    }
  }
  return report;
}

std::string power_report_csv(const PowerReport& report) {
  std::ostringstream out;
  out << "k,statistic,power,stderr,trials\n";
  for (const auto& c : report.cells) {
    out << c.k << ',' << statistic_name(c.statistic) << ',' << csv_num(c.power) << ','
        << csv_num(c.std_error) << ',' << c.trials << '\n';
  }
  return out.str();
}

std::string power_report_json(const PowerReport& report) {
  ordered_json j;
  j["scenario"] = ordered_json::parse(scenario_to_json_text(report.scenario));
  j["cells"] = ordered_json::array();
  for (const auto& c : report.cells) {
    j["cells"].push_back(ordered_json{{"k", c.k},
                                      {"statistic", statistic_name(c.statistic)},
                                      {"power", c.power},
                                      {"stderr", c.std_error},
                                      {"trials", c.trials}});
  }
  return j.dump(1);
}

namespace {

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

}  // namespace

double BoostingReport::mean_sd_ratio() const {
  return mean_of(sd_augmented) / mean_of(sd_initial);
}

double BoostingReport::mean_gap_change() const {
  return mean_of(gap_augmented) - mean_of(gap_initial);
}

BoostingReport variance_boosting_experiment(const BoostingSpec& spec) {
  if (spec.m < 2 || spec.n_initial < 2) {
    fail(errc::too_few_nodes, "the experiment needs m >= 2 and n_initial >= 2");
  }
  if (spec.n_added < 1) fail(errc::invalid_argument, "n_added must be >= 1");
  if (spec.d < 1) fail(errc::invalid_argument, "d must be >= 1");
  if (spec.trials < 1) fail(errc::invalid_argument, "trials must be >= 1");
  check_not_external(spec.graph);

  const int rows_initial = spec.m + spec.n_initial;
  const TwoSampleLayout layout_initial = block_layout(spec.m, spec.n_initial);
  const TwoSampleLayout layout_augmented = block_layout(spec.m, spec.n_initial + spec.n_added);

  struct Slot {
    double gap_i, gap_a, sd_i, sd_a, z_i, z_a;
  };
  std::vector<Slot> slots(spec.trials);
  int workers = spec.parallel ? resolve_threads(spec.threads) : 1;
  parallel_for(spec.trials, workers, [&](std::int64_t t) {
    std::uint64_t trial_key = substream(spec.seed, static_cast<std::uint64_t>(t));
    Rng rng(substream(trial_key, 0));
    VectorDataset full = draw_shifted(spec.m, spec.n_initial + spec.n_added, spec.d, spec.shift,
                                      spec.family, rng);
    VectorDataset initial;
    initial.rows = rows_initial;
    initial.cols = spec.d;
    initial.values.assign(full.values.begin(),
                          full.values.begin() + static_cast<std::size_t>(rows_initial) * spec.d);

    TestResult before = evaluate_statistic(build_graph(euclidean_distances(initial), spec.graph),
                                           layout_initial, StatisticKind::edge);
    TestResult after = evaluate_statistic(build_graph(euclidean_distances(full), spec.graph),
                                          layout_augmented, StatisticKind::edge);
    slots[t] = {before.null_mean - before.observed, after.null_mean - after.observed,
                before.null_sd,                     after.null_sd,
                before.z_score,                     after.z_score};
  });

  BoostingReport report;
  for (const auto& s : slots) {
    report.gap_initial.push_back(s.gap_i);
    report.gap_augmented.push_back(s.gap_a);
    report.sd_initial.push_back(s.sd_i);
    report.sd_augmented.push_back(s.sd_a);
    report.z_initial.push_back(s.z_i);
    report.z_augmented.push_back(s.z_a);
  }
  return report;
}

namespace {

double nearest_rank(std::vector<double> xs, double q) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(xs.size())));
  if (rank < 1) rank = 1;
  if (rank > xs.size()) rank = xs.size();
  return xs[rank - 1];
}

std::vector<double> abs_diffs(const AccuracyReport& report) {
  std::vector<double> out(report.p_asym.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::fabs(report.p_asym[i] - report.p_perm[i]);
  }
  return out;
}

}  // namespace

double AccuracyReport::median_abs_diff() const { return nearest_rank(abs_diffs(*this), 0.5); }

double AccuracyReport::q95_abs_diff() const { return nearest_rank(abs_diffs(*this), 0.95); }

AccuracyReport pvalue_accuracy_study(const ScenarioSpec& spec) {
  validate_scenario(spec);
  const StatisticKind kind = spec.statistics.front();
  const TwoSampleLayout layout = block_layout(spec.m, spec.n);

  std::vector<double> asym(spec.trials), perm(spec.trials);
  int workers = spec.parallel ? resolve_threads(spec.threads) : 1;
  parallel_for(spec.trials, workers, [&](std::int64_t t) {
    std::uint64_t trial_key = substream(spec.seed, static_cast<std::uint64_t>(t));
    Rng rng(substream(trial_key, 0));
    VectorDataset data = draw_shifted(spec.m, spec.n, spec.d, 0.0, spec.family, rng);
    SimilarityGraph graph = build_graph(euclidean_distances(data), spec.graph);
    PermutationConfig config;
    config.n_permutations = spec.n_permutations;
    config.seed = substream(trial_key, 1);
    TestResult r = permutation_pvalue(graph, layout, kind, config);
    perm[t] = *r.p_permutation;
    asym[t] = asymptotic_pvalue(r);
  });

  AccuracyReport report;
  report.p_asym = std::move(asym);
  report.p_perm = std::move(perm);
  return report;
}

std::string accuracy_report_csv(const AccuracyReport& report) {
  std::ostringstream out;
  out << "p_asym,p_perm\n";
  for (std::size_t i = 0; i < report.p_asym.size(); ++i) {
    out << csv_num(report.p_asym[i]) << ',' << csv_num(report.p_perm[i]) << '\n';
  }
  return out.str();
}

std::string accuracy_report_json(const AccuracyReport& report) {
  ordered_json j;
  j["trials"] = report.p_asym.size();
  j["median_abs_diff"] = report.median_abs_diff();
  j["q95_abs_diff"] = report.q95_abs_diff();
  j["pairs"] = ordered_json::array();
  for (std::size_t i = 0; i < report.p_asym.size(); ++i) {
    j["pairs"].push_back(ordered_json::array({report.p_asym[i], report.p_perm[i]}));
  }
  return j.dump(1);
}

}  // namespace graphtest
