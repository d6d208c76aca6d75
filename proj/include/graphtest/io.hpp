#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graphtest/distances.hpp"
#include "graphtest/inference.hpp"

namespace graphtest {

// File formats.
//   vector CSV     comma-separated numeric rows, one observation per line;
//                  optional header auto-detected by a non-numeric first line
//   labels         "1" or "2" per line, aligned with data row order
//   distance CSV   square numeric matrix, same header rule
//   networks       directory of s-by-s 0/1 CSVs ordered by filename, or a
//                  single JSON file holding an array of 0/1 matrices
//   edge list      two whitespace-separated 0-based node indices per line,
//                  '#' starts a comment line
// Parse failures raise ParseError with line/column in the message; shape
// problems raise DimensionMismatch (or AsymmetricMatrix for a distance
// matrix that is not exactly symmetric).

VectorDataset read_vector_csv(const std::string& path);
void write_vector_csv(const std::string& path, const VectorDataset& data);

TwoSampleLayout read_labels(const std::string& path);
void write_labels(const std::string& path, const TwoSampleLayout& layout);

DistanceMatrix read_distance_csv(const std::string& path);
void write_distance_csv(const std::string& path, const DistanceMatrix& d);

NetworkDataset read_networks(const std::string& path);
void write_networks_json(const std::string& path, const NetworkDataset& nets);

// node_count -1 infers max index + 1 from the file.
SimilarityGraph read_edge_list(const std::string& path, int node_count = -1);
void write_edge_list(const std::string& path, const SimilarityGraph& graph);
std::string edge_list_text(const SimilarityGraph& graph);

// Graph provenance echoed into every serialized result: builder kind,
// parameter k (absent for external edge lists), and |G|.
struct GraphMeta {
  std::string kind;
  std::optional<int> k;
  int edges = 0;
};

std::string test_result_json(const TestResult& result, const GraphMeta& graph);
std::string test_results_json(const std::vector<TestResult>& results, const GraphMeta& graph);

struct ParsedTestResult {
  TestResult result;
  GraphMeta graph;
};

ParsedTestResult test_result_from_json(const std::string& text);

}  // namespace graphtest
