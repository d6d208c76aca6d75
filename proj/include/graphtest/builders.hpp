#pragma once

#include <string>
#include <vector>

#include "graphtest/graph.hpp"

namespace graphtest {

// Symmetric nonnegative pairwise distances among N pooled observations,
// row-major. Invariants (exact symmetry, zero diagonal, finite and
// nonnegative entries) are enforced by make_distance_matrix.
struct DistanceMatrix {
  int size = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * size + j]; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * size + j]; }
};

DistanceMatrix make_distance_matrix(int size, std::vector<double> values);

enum class GraphKind { kmst, knn, kmdp, external };

const char* graph_kind_name(GraphKind kind);

// Which similarity graph to build. CLI syntax: kmst:K, knn:K, kmdp:K,
// external:PATH (a pre-built edge-list file).
struct GraphSpec {
  GraphKind kind = GraphKind::kmst;
  int k = 1;
  std::string path;
};

GraphSpec parse_graph_spec(const std::string& text);

// Minimum spanning tree over all non-excluded pairs; ties broken by
// (distance, i, j) so the result is deterministic. Disconnected when the
// exclusions leave no spanning tree.
SimilarityGraph minimum_spanning_tree(const DistanceMatrix& d,
                                      const std::vector<Edge>& excluded = {});

// Union of k edge-disjoint MSTs built iteratively, each round excluding
// everything used before. When k(N-1) >= N(N-1)/2 the rounds would exhaust
// every pair, so the complete graph is returned directly (saturation);
// otherwise a round that cannot span raises Disconnected with its index.
SimilarityGraph build_kmst(const DistanceMatrix& d, int k);

// The k individual trees, for callers that sweep k: the union of the
// first j rounds is exactly the j-MST. Always strict (no saturation).
std::vector<SimilarityGraph> kmst_rounds(const DistanceMatrix& d, int k);

// k nearest neighbors per node, symmetrized by union and deduplicated.
// Ties at the k-th distance keep the lexicographically smallest nodes.
SimilarityGraph build_knn(const DistanceMatrix& d, int k);

// Exact minimum-total-distance perfect matching (even N); excluded pairs
// are unusable. NoPerfectMatching when the remaining pairs cannot cover
// every node.
SimilarityGraph min_weight_perfect_matching(const DistanceMatrix& d,
                                            const std::vector<Edge>& excluded = {});

// Union of k edge-disjoint minimum matchings. Odd N: each round augments
// with a fresh pseudo node at distance 0 to everything, matches, drops the
// pseudo pair; exclusions only ever apply to real-node pairs.
SimilarityGraph build_kmdp(const DistanceMatrix& d, int k);

std::vector<SimilarityGraph> kmdp_rounds(const DistanceMatrix& d, int k);

SimilarityGraph merge_rounds(int node_count, const std::vector<SimilarityGraph>& rounds,
                             int first_k);

// Dispatch on a GraphSpec; external specs load the edge list at spec.path
// (node_count -1 means infer from the file).
SimilarityGraph build_graph(const DistanceMatrix& d, const GraphSpec& spec);
SimilarityGraph build_graph_external(const GraphSpec& spec, int node_count);

}  // namespace graphtest
