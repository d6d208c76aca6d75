#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "graphtest/distances.hpp"
#include "graphtest/inference.hpp"
#include "graphtest/io.hpp"
#include "graphtest/simulation.hpp"

namespace {

using graphtest::errc;
using graphtest::fail;

struct InputFlags {
  std::string data;
  std::string dist;
  std::string networks;
  std::string labels;
  std::string net_dist = "d1";
};

void add_input_flags(CLI::App* cmd, InputFlags* in, bool with_labels) {
  cmd->add_option("--data", in->data, "vector CSV, one observation per row");
  cmd->add_option("--dist", in->dist, "precomputed distance matrix CSV");
  cmd->add_option("--networks", in->networks,
                  "directory of adjacency CSVs or a JSON array of 0/1 matrices");
  cmd->add_option("--net-dist", in->net_dist, "network distance: d1 or d2")
      ->check(CLI::IsMember({"d1", "d2"}));
  if (with_labels) {
    cmd->add_option("--labels", in->labels, "sample labels file, one 1 or 2 per row");
  }
}

graphtest::DistanceMatrix load_distances(const InputFlags& in) {
  int modes = (!in.data.empty()) + (!in.dist.empty()) + (!in.networks.empty());
  if (modes != 1) {
    fail(errc::invalid_argument, "pass exactly one of --data, --dist, --networks");
  }
  if (!in.data.empty()) {
    return graphtest::euclidean_distances(graphtest::read_vector_csv(in.data));
  }
  if (!in.dist.empty()) {
    return graphtest::read_distance_csv(in.dist);
  }
  graphtest::NetworkDataset nets = graphtest::read_networks(in.networks);
  return in.net_dist == "d2" ? graphtest::network_distance_d2(nets)
                             : graphtest::network_distance_d1(nets);
}

graphtest::TwoSampleLayout load_labels(const InputFlags& in) {
  if (in.labels.empty()) {
    fail(errc::invalid_argument, "this command needs --labels");
  }
  return graphtest::read_labels(in.labels);
}

int env_threads() {
  const char* raw = std::getenv("GRAPHTEST_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  try {
    return std::max(0, std::stoi(raw));
  } catch (const std::exception&) {
    fail(errc::invalid_argument, std::string("GRAPHTEST_THREADS is not an integer: ") + raw);
  }
}

// --threads wins, then GRAPHTEST_THREADS, then hardware (0).
int resolve_thread_flag(int flag_value, bool flag_given) {
  if (flag_given) return flag_value;
  return env_threads();
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) fail(errc::parse_error, out_path + ": cannot open for writing");
  out << text;
  std::cerr << "wrote " << out_path << "\n";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::parse_error, path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

graphtest::GraphMeta meta_for(const graphtest::GraphSpec& spec,
                              const graphtest::SimilarityGraph& graph) {
  graphtest::GraphMeta meta;
  meta.kind = graphtest::graph_kind_name(spec.kind);
  if (spec.kind != graphtest::GraphKind::external) meta.k = spec.k;
  meta.edges = graph.edge_count();
  return meta;
}

std::vector<graphtest::StatisticKind> parse_stats(const std::string& name) {
  if (name == "all") return graphtest::all_statistics();
  return {graphtest::statistic_from_name(name)};
}

struct TestFlags {
  InputFlags in;
  std::string graph = "kmst:5";
  std::string stat = "weighted";
  std::string pvalue;  // empty = auto
  int nperm = 1000;
  std::uint64_t seed = 0;
  int threads = 0;
  bool threads_given = false;
  std::string out;
};

void run_test(const TestFlags& f) {
  graphtest::DistanceMatrix dist = load_distances(f.in);
  graphtest::TwoSampleLayout layout = load_labels(f.in);
  graphtest::GraphSpec spec = graphtest::parse_graph_spec(f.graph);
  graphtest::SimilarityGraph graph = graphtest::build_graph(dist, spec);

  std::string mode = f.pvalue;
  if (mode.empty()) mode = dist.size <= 1000 ? "both" : "asym";
  std::vector<graphtest::StatisticKind> kinds = parse_stats(f.stat);

  std::vector<graphtest::TestResult> results;
  if (mode == "perm" || mode == "both") {
    graphtest::PermutationConfig config;
    config.n_permutations = f.nperm;
    config.seed = f.seed;
    config.parallel = true;
    config.threads = resolve_thread_flag(f.threads, f.threads_given);
    results = graphtest::permutation_pvalues(graph, layout, kinds, config);
  } else {
    for (auto kind : kinds) {
      graphtest::TestResult r = graphtest::evaluate_statistic(graph, layout, kind);
      r.seed = f.seed;
      results.push_back(r);
    }
  }
  if (mode == "asym" || mode == "both") {
    for (auto& r : results) r.p_asymptotic = graphtest::asymptotic_pvalue(r);
  }

  graphtest::GraphMeta meta = meta_for(spec, graph);
  std::string text = results.size() == 1 ? graphtest::test_result_json(results[0], meta)
                                         : graphtest::test_results_json(results, meta);
  emit(f.out, text + "\n");
}

struct GraphFlags {
  InputFlags in;
  std::string graph;
  std::string out;
};

void run_graph(const GraphFlags& f) {
  graphtest::DistanceMatrix dist = load_distances(f.in);
  graphtest::SimilarityGraph graph =
      graphtest::build_graph(dist, graphtest::parse_graph_spec(f.graph));
  emit(f.out, graphtest::edge_list_text(graph));
}

struct DiagnoseFlags {
  InputFlags in;
  std::string graph = "kmst:5";
  std::string out;
};

void run_diagnose(const DiagnoseFlags& f) {
  graphtest::DistanceMatrix dist = load_distances(f.in);
  graphtest::GraphSpec spec = graphtest::parse_graph_spec(f.graph);
  graphtest::SimilarityGraph graph = graphtest::build_graph(dist, spec);
  graphtest::DegreeStats gs = graphtest::degree_stats(graph);
  graphtest::NeighborhoodStats ns = graphtest::neighborhood_stats(graph);

  graphtest::GraphDiagnostics diag;
  if (!f.in.labels.empty()) {
    graphtest::TwoSampleLayout layout = graphtest::read_labels(f.in.labels);
    if (layout.total() != graph.node_count) {
      fail(errc::length_mismatch, "labels do not match the observation count");
    }
    diag = graphtest::diagnose(graph, layout.m, layout.n);
  } else {
    diag = graphtest::diagnose(graph);
  }

  nlohmann::ordered_json j;
  j["node_count"] = graph.node_count;
  j["edges"] = graph.edge_count();
  j["degree_square_sum"] = gs.degree_square_sum;
  j["flatness_gap"] = gs.flatness_gap;
  j["sum_a_sq"] = ns.sum_a_sq;
  j["sum_ab"] = ns.sum_ab;
  j["alpha_hat"] = diag.alpha_hat;
  j["ratio_ab"] = diag.ratio_ab;
  j["ratio_a2"] = diag.ratio_a2;
  j["flatness_gap_over_edges"] = diag.flatness_gap_over_edges;
  if (diag.boosting_term) {
    j["boosting_term"] = *diag.boosting_term;
  } else {
    j["boosting_term"] = nullptr;
  }
  emit(f.out, j.dump(1) + "\n");
}

struct StudyFlags {
  std::string scenario;
  std::string out;
  // overrides; applied only when the flag was passed
  int m = 0, n = 0, d = 0, trials = 0, nperm = 0, threads = 0;
  double shift = 0.0, alpha = 0.0;
  std::uint64_t seed = 0;
  std::string family, graph, stat;
  std::vector<int> ks;
  bool perm = false;
};

// Pointers so the callback can ask which flags were actually given.
struct StudyOptions {
  CLI::Option* m = nullptr;
  CLI::Option* n = nullptr;
  CLI::Option* d = nullptr;
  CLI::Option* shift = nullptr;
  CLI::Option* family = nullptr;
  CLI::Option* graph = nullptr;
  CLI::Option* ks = nullptr;
  CLI::Option* stat = nullptr;
  CLI::Option* trials = nullptr;
  CLI::Option* alpha = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* nperm = nullptr;
  CLI::Option* perm = nullptr;
  CLI::Option* threads = nullptr;
};

StudyOptions add_study_flags(CLI::App* cmd, StudyFlags* f, const char* stat_default) {
  StudyOptions opts;
  cmd->add_option("--scenario", f->scenario, "scenario JSON file; flags below override it");
  cmd->add_option("--out", f->out, "report base path; writes BASE.csv and BASE.json");
  opts.m = cmd->add_option("--m", f->m, "sample 1 size");
  opts.n = cmd->add_option("--n", f->n, "sample 2 size");
  opts.d = cmd->add_option("--d", f->d, "dimension");
  opts.shift = cmd->add_option("--shift", f->shift, "mean shift between the samples");
  opts.family = cmd->add_option("--family", f->family, "gaussian, t10, or t5")
                    ->check(CLI::IsMember({"gaussian", "t10", "t5"}));
  opts.graph = cmd->add_option("--graph", f->graph, "graph spec, e.g. kmst:5");
  opts.ks = cmd->add_option("--ks", f->ks, "k values to sweep")->delimiter(',');
  f->stat = stat_default;
  opts.stat = cmd->add_option("--stat", f->stat, "statistic name, or 'all'");
  opts.trials = cmd->add_option("--trials", f->trials, "Monte Carlo trials");
  opts.alpha = cmd->add_option("--alpha", f->alpha, "rejection level");
  opts.seed = cmd->add_option("--seed", f->seed, "master seed");
  opts.nperm = cmd->add_option("--nperm", f->nperm, "permutations per test");
  opts.perm = cmd->add_flag("--perm", f->perm, "use permutation p-values");
  opts.threads = cmd->add_option("--threads", f->threads, "worker thread cap");
  return opts;
}

graphtest::ScenarioSpec study_scenario(const StudyFlags& f, const StudyOptions& o,
                                       bool stat_always) {
  graphtest::ScenarioSpec spec;
  if (!f.scenario.empty()) spec = graphtest::scenario_from_json_text(slurp(f.scenario));
  if (o.m->count()) spec.m = f.m;
  if (o.n->count()) spec.n = f.n;
  if (o.d->count()) spec.d = f.d;
  if (o.shift->count()) spec.shift = f.shift;
  if (o.family->count()) {
    spec.family = f.family == "t10"  ? graphtest::SampleFamily::t10
                  : f.family == "t5" ? graphtest::SampleFamily::t5
                                     : graphtest::SampleFamily::gaussian;
  }
  if (o.graph->count()) spec.graph = graphtest::parse_graph_spec(f.graph);
  if (o.ks->count()) spec.ks = f.ks;
  if (o.stat->count() || stat_always) spec.statistics = parse_stats(f.stat);
  if (o.trials->count()) spec.trials = f.trials;
  if (o.alpha->count()) spec.alpha = f.alpha;
  if (o.seed->count()) spec.seed = f.seed;
  if (o.nperm->count()) spec.n_permutations = f.nperm;
  if (o.perm->count()) spec.permutation_pvalues = f.perm;
  int threads = resolve_thread_flag(f.threads, o.threads->count() > 0);
  if (threads > 0 || o.threads->count()) {
    spec.parallel = true;
    spec.threads = threads;
  }
  return spec;
}

void emit_study(const std::string& out, const std::string& csv, const std::string& json) {
  if (out.empty()) {
    std::cout << csv;
    return;
  }
  emit(out + ".csv", csv);
  emit(out + ".json", json + "\n");
}

void run_power(const StudyFlags& f, const StudyOptions& o) {
  graphtest::PowerReport report = graphtest::run_power_study(study_scenario(f, o, false));
  emit_study(f.out, graphtest::power_report_csv(report), graphtest::power_report_json(report));
}

void run_accuracy(const StudyFlags& f, const StudyOptions& o) {
  graphtest::AccuracyReport report =
      graphtest::pvalue_accuracy_study(study_scenario(f, o, true));
  emit_study(f.out, graphtest::accuracy_report_csv(report),
             graphtest::accuracy_report_json(report));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-based two-sample tests on multivariate or network data"};
  app.require_subcommand(1);

  TestFlags test_flags;
  CLI::App* cmd_test = app.add_subcommand("test", "run two-sample tests on one dataset");
  add_input_flags(cmd_test, &test_flags.in, true);
  cmd_test->add_option("--graph", test_flags.graph, "graph spec: kmst:K, knn:K, kmdp:K, external:PATH");
  cmd_test->add_option("--stat", test_flags.stat,
                       "edge, weighted, weighted_tilde, generalized, maxtype, or all");
  cmd_test->add_option("--pvalue", test_flags.pvalue,
                       "perm, asym, or both (default: both up to N=1000, asym beyond)")
      ->check(CLI::IsMember({"perm", "asym", "both"}));
  cmd_test->add_option("--nperm", test_flags.nperm, "permutations");
  cmd_test->add_option("--seed", test_flags.seed, "permutation seed");
  CLI::Option* test_threads =
      cmd_test->add_option("--threads", test_flags.threads, "worker thread cap");
  cmd_test->add_option("--out", test_flags.out, "write the JSON here instead of stdout");
  cmd_test->callback([&] {
    test_flags.threads_given = test_threads->count() > 0;
    run_test(test_flags);
  });

  GraphFlags graph_flags;
  CLI::App* cmd_graph = app.add_subcommand("graph", "build a similarity graph, print its edges");
  add_input_flags(cmd_graph, &graph_flags.in, false);
  cmd_graph->add_option("--graph", graph_flags.graph, "graph spec, e.g. kmst:9")->required();
  cmd_graph->add_option("--out", graph_flags.out, "write the edge list here instead of stdout");
  cmd_graph->callback([&] { run_graph(graph_flags); });

  DiagnoseFlags diag_flags;
  CLI::App* cmd_diag = app.add_subcommand("diagnose", "graph summaries behind the moment formulas");
  add_input_flags(cmd_diag, &diag_flags.in, true);
  cmd_diag->add_option("--graph", diag_flags.graph, "graph spec, e.g. kmst:5");
  cmd_diag->add_option("--out", diag_flags.out, "write the JSON here instead of stdout");
  cmd_diag->callback([&] { run_diagnose(diag_flags); });

  StudyFlags power_flags;
  CLI::App* cmd_power = app.add_subcommand("power", "rejection-rate study over a k sweep");
  StudyOptions power_opts = add_study_flags(cmd_power, &power_flags, "all");
  cmd_power->callback([&] { run_power(power_flags, power_opts); });

  StudyFlags acc_flags;
  CLI::App* cmd_acc =
      app.add_subcommand("accuracy", "asymptotic vs permutation p-values on null data");
  StudyOptions acc_opts = add_study_flags(cmd_acc, &acc_flags, "weighted");
  cmd_acc->callback([&] { run_accuracy(acc_flags, acc_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const graphtest::Error& e) {
    std::cerr << "error (" << graphtest::errc_name(e.code()) << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
