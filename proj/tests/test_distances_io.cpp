#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "graphtest/distances.hpp"
#include "graphtest/io.hpp"

using namespace graphtest;
namespace fs = std::filesystem;

namespace {

template <class Fn>
errc error_code_of(Fn&& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("expected a graphtest::Error");
  return errc::invalid_argument;
}

struct TempFile {
  std::string path;
  TempFile(const std::string& name, const std::string& content)
      : path((fs::temp_directory_path() / name).string()) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() {
    std::error_code ec;
    fs::remove(path, ec);
  }
};

// three directed 3-node networks with known disagreement counts
NetworkDataset sample_networks() {
  NetworkDataset nets;
  nets.count = 3;
  nets.size = 3;
  nets.values = {
      0, 1, 0, 0, 0, 1, 0, 0, 0,  // A: edges 0->1, 1->2
      0, 1, 0, 0, 0, 0, 1, 0, 0,  // B: edges 0->1, 2->0
      0, 1, 0, 0, 0, 0, 0, 0, 0,  // C: edge 0->1
  };
  return nets;
}

}  // namespace

TEST_CASE("euclidean distances") {
  VectorDataset data;
  data.rows = 3;
  data.cols = 2;
  data.values = {0, 0, 3, 4, 0, 1};
  DistanceMatrix d = euclidean_distances(data);
  CHECK(d.at(0, 1) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(d.at(0, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.at(1, 2) == doctest::Approx(std::sqrt(18.0)).epsilon(1e-14));
  CHECK(d.at(2, 1) == d.at(1, 2));
  CHECK(d.at(1, 1) == 0.0);

  data.values[2] = std::nan("");
  CHECK(error_code_of([&] { euclidean_distances(data); }) == errc::non_finite_input);
}

TEST_CASE("network disagreement distances") {
  NetworkDataset nets = sample_networks();
  DistanceMatrix d1 = network_distance_d1(nets);
  CHECK(d1.at(0, 1) == doctest::Approx(2.0));
  CHECK(d1.at(0, 2) == doctest::Approx(1.0));
  CHECK(d1.at(1, 2) == doctest::Approx(1.0));

  DistanceMatrix d2 = network_distance_d2(nets);
  // ||A||_F = ||B||_F = sqrt(2), ||C||_F = 1
  CHECK(d2.at(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d2.at(0, 2) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(d2.at(1, 2) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("empty networks break the normalized distance only") {
  NetworkDataset nets = sample_networks();
  for (int j = 0; j < 9; ++j) nets.values[9 + j] = 0;  // clear network B
  CHECK(network_distance_d1(nets).at(0, 1) == doctest::Approx(2.0));
  CHECK(error_code_of([&] { network_distance_d2(nets); }) == errc::zero_network);
}

TEST_CASE("vector csv reads with and without a header") {
  TempFile with_header("gt_vec_header.csv", "x,y\n1,2\n3,4\n");
  VectorDataset a = read_vector_csv(with_header.path);
  CHECK(a.rows == 2);
  CHECK(a.cols == 2);
  CHECK(a.at(1, 0) == 3.0);

  TempFile plain("gt_vec_plain.csv", "1.5,2\n-3e2,4\n");
  VectorDataset b = read_vector_csv(plain.path);
  CHECK(b.rows == 2);
  CHECK(b.at(0, 0) == 1.5);
  CHECK(b.at(1, 0) == -300.0);
}

TEST_CASE("vector csv surfaces parse position and shape problems") {
  TempFile bad_cell("gt_vec_bad.csv", "1,2\n3,oops\n");
  std::string message;
  CHECK(error_code_of([&] { read_vector_csv(bad_cell.path); }, &message) == errc::parse_error);
  // line 2, character 3 (where the bad cell starts)
  CHECK(message.find(":2:3") != std::string::npos);
  CHECK(message.find("oops") != std::string::npos);

  TempFile ragged("gt_vec_ragged.csv", "1,2\n3\n");
  CHECK(error_code_of([&] { read_vector_csv(ragged.path); }) == errc::dimension_mismatch);

  TempFile only_header("gt_vec_head_only.csv", "a,b\n");
  CHECK(error_code_of([&] { read_vector_csv(only_header.path); }, &message) == errc::parse_error);
  CHECK(message.find("no data rows") != std::string::npos);

  CHECK(error_code_of([] { read_vector_csv("gt_missing_file.csv"); }) == errc::parse_error);
}

TEST_CASE("vector csv round trips at full precision") {
  VectorDataset data;
  data.rows = 2;
  data.cols = 3;
  data.values = {0.1, -2.5e-17, 3.141592653589793, 1e300, -7, 0};
  TempFile spot("gt_vec_rt.csv", "");
  write_vector_csv(spot.path, data);
  VectorDataset back = read_vector_csv(spot.path);
  REQUIRE(back.rows == data.rows);
  REQUIRE(back.cols == data.cols);
  for (std::size_t i = 0; i < data.values.size(); ++i) CHECK(back.values[i] == data.values[i]);
}

TEST_CASE("labels read and write") {
  TempFile labels("gt_labels.txt", "1\n1\n2\n2\n2\n");
  TwoSampleLayout lay = read_labels(labels.path);
  CHECK(lay.m == 2);
  CHECK(lay.n == 3);

  TempFile wide("gt_labels_wide.txt", "1,2\n1,2\n");
  CHECK(error_code_of([&] { read_labels(wide.path); }) == errc::parse_error);

  TempFile bad_value("gt_labels_bad.txt", "1\n1\n2\n7\n");
  CHECK(error_code_of([&] { read_labels(bad_value.path); }) == errc::invalid_argument);

  TempFile out("gt_labels_out.txt", "");
  write_labels(out.path, lay);
  TwoSampleLayout back = read_labels(out.path);
  CHECK(back.labels == lay.labels);
}

TEST_CASE("distance csv wants a symmetric square matrix") {
  TempFile good("gt_dist_good.csv", "0,1,2\n1,0,3\n2,3,0\n");
  DistanceMatrix d = read_distance_csv(good.path);
  CHECK(d.size == 3);
  CHECK(d.at(1, 2) == 3.0);

  TempFile rect("gt_dist_rect.csv", "0,1,2\n1,0,3\n");
  CHECK(error_code_of([&] { read_distance_csv(rect.path); }) == errc::dimension_mismatch);

  TempFile asym("gt_dist_asym.csv", "0,1\n2,0\n");
  CHECK(error_code_of([&] { read_distance_csv(asym.path); }) == errc::asymmetric_matrix);

  TempFile rt("gt_dist_rt.csv", "");
  write_distance_csv(rt.path, d);
  DistanceMatrix back = read_distance_csv(rt.path);
  REQUIRE(back.size == d.size);
  for (std::size_t i = 0; i < d.values.size(); ++i) CHECK(back.values[i] == d.values[i]);
}

TEST_CASE("edge lists: text form, comments, inference, round trip") {
  SimilarityGraph path = validate_graph(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(edge_list_text(path) == "0 1\n1 2\n2 3\n");

  TempFile commented("gt_edges.txt", "# similarity graph\n1 0\n\n2 1 # dup of nothing\n3 2\n");
  SimilarityGraph g = read_edge_list(commented.path);
  CHECK(g.node_count == 4);
  CHECK(g.edges == path.edges);

  SimilarityGraph padded = read_edge_list(commented.path, 6);
  CHECK(padded.node_count == 6);

  TempFile out("gt_edges_out.txt", "");
  write_edge_list(out.path, path);
  SimilarityGraph back = read_edge_list(out.path);
  CHECK(back.edges == path.edges);

  TempFile three("gt_edges_three.txt", "0 1 2\n");
  CHECK(error_code_of([&] { read_edge_list(three.path); }) == errc::parse_error);
  TempFile lonely("gt_edges_one.txt", "0\n");
  CHECK(error_code_of([&] { read_edge_list(lonely.path); }) == errc::parse_error);
  TempFile negative("gt_edges_neg.txt", "-1 2\n");
  CHECK(error_code_of([&] { read_edge_list(negative.path); }) == errc::parse_error);
}

TEST_CASE("test results serialize and parse back") {
  TestResult r;
  r.kind = StatisticKind::weighted;
  r.observed = 565.44;
  r.null_mean = 543.86;
  r.null_sd = 9.50;
  r.z_score = 2.272;
  r.p_permutation = 0.023;
  r.p_asymptotic = 0.0116;
  r.reject_small = false;
  r.seed = 7;
  r.n_permutations = 1000;
  GraphMeta meta{"kmst", 9, 2682};

  ParsedTestResult back = test_result_from_json(test_result_json(r, meta));
  CHECK(back.result.kind == r.kind);
  CHECK(back.result.observed == r.observed);
  CHECK(back.result.null_mean == r.null_mean);
  CHECK(back.result.null_sd == r.null_sd);
  CHECK(back.result.z_score == r.z_score);
  CHECK(*back.result.p_permutation == *r.p_permutation);
  CHECK(*back.result.p_asymptotic == *r.p_asymptotic);
  CHECK(back.result.reject_small == r.reject_small);
  CHECK(back.result.seed == 7);
  CHECK(back.result.n_permutations == 1000);
  CHECK(back.graph.kind == "kmst");
  REQUIRE(back.graph.k.has_value());
  CHECK(*back.graph.k == 9);
  CHECK(back.graph.edges == 2682);

  // external graphs have no k; missing p-values stay missing
  r.p_permutation.reset();
  GraphMeta ext{"external", std::nullopt, 10};
  ParsedTestResult ext_back = test_result_from_json(test_result_json(r, ext));
  CHECK_FALSE(ext_back.result.p_permutation.has_value());
  CHECK_FALSE(ext_back.graph.k.has_value());

  CHECK(error_code_of([] { test_result_from_json("{ not json"); }) == errc::parse_error);
}

TEST_CASE("multi-result payload carries the graph once") {
  TestResult a;
  a.kind = StatisticKind::edge;
  TestResult b;
  b.kind = StatisticKind::generalized;
  std::string text = test_results_json({a, b}, GraphMeta{"knn", 3, 17});
  auto doc = nlohmann::json::parse(text);
  CHECK(doc["graph"]["kind"] == "knn");
  CHECK(doc["graph"]["k"] == 3);
  CHECK(doc["graph"]["edges"] == 17);
  REQUIRE(doc["results"].is_array());
  REQUIRE(doc["results"].size() == 2);
  CHECK(doc["results"][0]["statistic"] == "edge");
  CHECK(doc["results"][1]["statistic"] == "generalized");
}

TEST_CASE("networks round trip through JSON") {
  NetworkDataset nets = sample_networks();
  TempFile file("gt_nets.json", "");
  write_networks_json(file.path, nets);
  NetworkDataset back = read_networks(file.path);
  CHECK(back.count == nets.count);
  CHECK(back.size == nets.size);
  CHECK(back.values == nets.values);
}

TEST_CASE("network JSON validation") {
  TempFile self_loop("gt_nets_diag.json", "[[[1,0],[0,0]]]");
  CHECK(error_code_of([&] { read_networks(self_loop.path); }) == errc::parse_error);
  TempFile two_valued("gt_nets_two.json", "[[[0,2],[1,0]]]");
  CHECK(error_code_of([&] { read_networks(two_valued.path); }) == errc::parse_error);
  TempFile rect("gt_nets_rect.json", "[[[0,1],[1,0],[0,0]]]");
  CHECK(error_code_of([&] { read_networks(rect.path); }) == errc::shape_mismatch);
  TempFile mixed("gt_nets_mixed.json", "[[[0,1],[1,0]],[[0]]]");
  CHECK(error_code_of([&] { read_networks(mixed.path); }) == errc::shape_mismatch);
  TempFile empty("gt_nets_empty.json", "[]");
  CHECK(error_code_of([&] { read_networks(empty.path); }) == errc::parse_error);
}

TEST_CASE("networks load from a directory of csv files in name order") {
  fs::path dir = fs::temp_directory_path() / "gt_nets_dir";
  fs::create_directories(dir);
  {
    std::ofstream a(dir / "day_a.csv");
    a << "0,1,0\n0,0,1\n0,0,0\n";
    std::ofstream b(dir / "day_b.csv");
    b << "0,1,0\n0,0,0\n1,0,0\n";
  }
  NetworkDataset nets = read_networks(dir.string());
  CHECK(nets.count == 2);
  CHECK(nets.size == 3);
  CHECK(nets.at(0, 1, 2) == 1);
  CHECK(nets.at(1, 2, 0) == 1);
  CHECK(nets.at(1, 1, 2) == 0);

  {
    std::ofstream c(dir / "day_c.csv");
    c << "0,1\n1,0\n";
  }
  CHECK(error_code_of([&] { read_networks(dir.string()); }) == errc::shape_mismatch);
  fs::remove_all(dir);

  fs::path hollow = fs::temp_directory_path() / "gt_nets_hollow";
  fs::create_directories(hollow);
  CHECK(error_code_of([&] { read_networks(hollow.string()); }) == errc::parse_error);
  fs::remove_all(hollow);
}
