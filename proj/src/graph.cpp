#include "graphtest/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace graphtest {

SimilarityGraph validate_graph(int node_count, std::vector<Edge> edges) {
  if (node_count < 2) {
    fail(errc::too_few_nodes, "graph needs at least 2 nodes, got " + std::to_string(node_count));
  }
  for (auto& e : edges) {
    if (e.u == e.v) {
      fail(errc::self_loop, "self loop at node " + std::to_string(e.u));
    }
    if (e.u < 0 || e.v < 0 || e.u >= node_count || e.v >= node_count) {
      fail(errc::index_out_of_range,
           "edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) + ") out of range for " +
               std::to_string(node_count) + " nodes");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  auto dup = std::adjacent_find(edges.begin(), edges.end());
  if (dup != edges.end()) {
    fail(errc::duplicate_edge,
         "duplicate edge (" + std::to_string(dup->u) + ", " + std::to_string(dup->v) + ")");
  }
  return SimilarityGraph{node_count, std::move(edges)};
}

DegreeStats degree_stats(const SimilarityGraph& graph) {
  DegreeStats out;
  out.degrees.assign(graph.node_count, 0);
  for (const auto& e : graph.edges) {
    ++out.degrees[e.u];
    ++out.degrees[e.v];
  }
  out.edge_count = graph.edge_count();
  for (int deg : out.degrees) {
    out.degree_square_sum += static_cast<std::int64_t>(deg) * deg;
  }
  double g = static_cast<double>(out.edge_count);
  out.flatness_gap =
      static_cast<double>(out.degree_square_sum) - 4.0 * g * g / graph.node_count;
  return out;
}

NeighborhoodStats neighborhood_stats(const SimilarityGraph& graph) {
  const int edge_count = graph.edge_count();
  NeighborhoodStats out;
  out.a_sizes.assign(edge_count, 0);
  out.b_sizes.assign(edge_count, 0);

  std::vector<std::vector<int>> adjacent(graph.node_count);
  for (const auto& e : graph.edges) {
    adjacent[e.u].push_back(e.v);
    adjacent[e.v].push_back(e.u);
  }

  // touched marks the endpoints of A_e's members: e's own endpoints plus
  // all their neighbors. An edge belongs to B_e exactly when it has an
  // endpoint in that set.
  std::vector<char> touched(graph.node_count, 0);
  std::vector<int> stamp;
  for (int idx = 0; idx < edge_count; ++idx) {
    const Edge& e = graph.edges[idx];

    std::int64_t a_size = 0;
    for (const auto& f : graph.edges) {
      if (f.u == e.u || f.v == e.u || f.u == e.v || f.v == e.v) ++a_size;
    }
    out.a_sizes[idx] = a_size;

    stamp.clear();
    auto mark = [&](int node) {
      if (!touched[node]) {
        touched[node] = 1;
        stamp.push_back(node);
      }
    };
    mark(e.u);
    mark(e.v);
    for (int nb : adjacent[e.u]) mark(nb);
    for (int nb : adjacent[e.v]) mark(nb);

    std::int64_t b_size = 0;
    for (const auto& f : graph.edges) {
      if (touched[f.u] || touched[f.v]) ++b_size;
    }
    out.b_sizes[idx] = b_size;
    for (int node : stamp) touched[node] = 0;

    out.sum_a_sq += a_size * a_size;
    out.sum_ab += a_size * b_size;
  }
  return out;
}

namespace {

GraphDiagnostics diagnose_impl(const SimilarityGraph& graph) {
  if (graph.node_count < 3) {
    fail(errc::too_few_nodes, "diagnostics need at least 3 nodes");
  }
  if (graph.edge_count() == 0) {
    fail(errc::degenerate_graph, "graph has no edges");
  }
  DegreeStats gs = degree_stats(graph);
  NeighborhoodStats ns = neighborhood_stats(graph);

  GraphDiagnostics out;
  double log_n = std::log(static_cast<double>(graph.node_count));
  out.alpha_hat = std::log(static_cast<double>(gs.edge_count)) / log_n;
  out.ratio_ab = static_cast<double>(ns.sum_ab) /
                 std::pow(static_cast<double>(graph.node_count), 1.5 * out.alpha_hat);
  out.ratio_a2 = static_cast<double>(ns.sum_a_sq) /
                 std::pow(static_cast<double>(graph.node_count), out.alpha_hat + 0.5);
  out.flatness_gap_over_edges = gs.flatness_gap / static_cast<double>(gs.edge_count);
  return out;
}

}  // namespace

GraphDiagnostics diagnose(const SimilarityGraph& graph) { return diagnose_impl(graph); }

GraphDiagnostics diagnose(const SimilarityGraph& graph, int m, int n) {
  GraphDiagnostics out = diagnose_impl(graph);
  if (m < 2 || n < 2) {
    fail(errc::too_few_nodes, "both samples need at least 2 observations");
  }
  DegreeStats gs = degree_stats(graph);
  double diff = static_cast<double>(n) - static_cast<double>(m);
  out.boosting_term =
      diff * diff / (static_cast<double>(m - 1) * static_cast<double>(n - 1)) * gs.flatness_gap;
  return out;
}

}  // namespace graphtest
