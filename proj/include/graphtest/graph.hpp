#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "graphtest/errors.hpp"

namespace graphtest {

// Unordered node pair; canonical form keeps the smaller index first.
struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Undirected simple graph on nodes 0..node_count-1. Edges are stored in
// canonical form (u < v, sorted lexicographically), which fixes a
// deterministic iteration order for everything downstream. Construct
// through validate_graph or the builders so the invariants actually hold.
struct SimilarityGraph {
  int node_count = 0;
  std::vector<Edge> edges;

  int edge_count() const { return static_cast<int>(edges.size()); }
};

// Canonicalizes an edge list and rejects self loops, duplicate unordered
// pairs, and out-of-range endpoints.
SimilarityGraph validate_graph(int node_count, std::vector<Edge> edges);

// Per-node degrees plus the aggregates every moment formula consumes.
// flatness_gap is D = sum(deg^2) - 4|G|^2/N; it is zero exactly when all
// degrees are equal (a "flat" graph, e.g. a perfect matching union).
struct DegreeStats {
  std::vector<int> degrees;
  std::int64_t edge_count = 0;
  std::int64_t degree_square_sum = 0;
  double flatness_gap = 0.0;
};

DegreeStats degree_stats(const SimilarityGraph& graph);

// Edge neighborhoods. A_e holds e plus every edge sharing a node with e,
// so |A_e| = deg(u) + deg(v) - 1. B_e adds every edge sharing a node with
// some member of A_e. The two sums drive the diagnostics that say whether
// the normal approximation of the standardized statistics can be trusted.
struct NeighborhoodStats {
  std::vector<std::int64_t> a_sizes;
  std::vector<std::int64_t> b_sizes;
  std::int64_t sum_a_sq = 0;
  std::int64_t sum_ab = 0;
};

NeighborhoodStats neighborhood_stats(const SimilarityGraph& graph);

// Scale-free growth summaries of a graph family. alpha_hat estimates the
// exponent in |G| = O(N^alpha); the ratios rescale the neighborhood sums
// by the rates they must stay below for asymptotic normality; the last
// field compares the degree-spread gap D against |G|.
struct GraphDiagnostics {
  double alpha_hat = 0.0;
  double ratio_ab = 0.0;
  double ratio_a2 = 0.0;
  double flatness_gap_over_edges = 0.0;
  // (n-m)^2/((m-1)(n-1)) * D: the unequal-sample-size variance inflation
  // of the between-sample edge count. Present when sample sizes are given.
  std::optional<double> boosting_term;
};

GraphDiagnostics diagnose(const SimilarityGraph& graph);
GraphDiagnostics diagnose(const SimilarityGraph& graph, int m, int n);

}  // namespace graphtest
