#include "graphtest/builders.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "graphtest/io.hpp"

namespace graphtest {

DistanceMatrix make_distance_matrix(int size, std::vector<double> values) {
  if (size < 1) {
    fail(errc::too_few_nodes, "distance matrix needs at least 1 row");
  }
  if (values.size() != static_cast<std::size_t>(size) * size) {
    fail(errc::dimension_mismatch,
         "distance matrix wants " + std::to_string(size) + "x" + std::to_string(size) +
             " values, got " + std::to_string(values.size()));
  }
  DistanceMatrix d{size, std::move(values)};
  for (int i = 0; i < size; ++i) {
    if (d.at(i, i) != 0.0) {
      fail(errc::invalid_argument, "distance matrix diagonal must be zero at row " +
                                       std::to_string(i));
    }
    for (int j = 0; j < size; ++j) {
      double v = d.at(i, j);
      if (!std::isfinite(v)) {
        fail(errc::non_finite_input, "non-finite distance at (" + std::to_string(i) + ", " +
                                         std::to_string(j) + ")");
      }
      if (v < 0.0) {
        fail(errc::invalid_argument, "negative distance at (" + std::to_string(i) + ", " +
                                         std::to_string(j) + ")");
      }
      if (j > i && v != d.at(j, i)) {
        fail(errc::asymmetric_matrix, "distance matrix is not symmetric at (" +
                                          std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
  return d;
}

const char* graph_kind_name(GraphKind kind) {
  switch (kind) {
    case GraphKind::kmst: return "kmst";
    case GraphKind::knn: return "knn";
    case GraphKind::kmdp: return "kmdp";
    case GraphKind::external: return "external";
  }
  return "unknown";
}

GraphSpec parse_graph_spec(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size()) {
    fail(errc::invalid_argument,
         "graph spec '" + text + "' must look like kmst:K, knn:K, kmdp:K, or external:PATH");
  }
  std::string head = text.substr(0, colon);
  std::string rest = text.substr(colon + 1);
  GraphSpec spec;
  if (head == "external") {
    spec.kind = GraphKind::external;
    spec.path = rest;
    return spec;
  }
  if (head == "kmst") {
    spec.kind = GraphKind::kmst;
  } else if (head == "knn") {
    spec.kind = GraphKind::knn;
  } else if (head == "kmdp") {
    spec.kind = GraphKind::kmdp;
  } else {
    fail(errc::invalid_argument, "unknown graph kind '" + head + "'");
  }
  std::size_t used = 0;
  int k = 0;
  try {
    k = std::stoi(rest, &used);
  } catch (const std::exception&) {
    fail(errc::invalid_argument, "graph spec '" + text + "' has a non-integer k");
  }
  if (used != rest.size() || k < 1) {
    fail(errc::invalid_argument, "graph spec '" + text + "' needs an integer k >= 1");
  }
  spec.k = k;
  return spec;
}

namespace {

// Pair exclusion mask with O(1) lookup; edges are canonicalized on entry.
struct EdgeMask {
  int size = 0;
  std::vector<char> used;

  explicit EdgeMask(int n) : size(n), used(static_cast<std::size_t>(n) * n, 0) {}

  bool test(int i, int j) const { return used[static_cast<std::size_t>(i) * size + j] != 0; }

  void set(int i, int j) {
    used[static_cast<std::size_t>(i) * size + j] = 1;
    used[static_cast<std::size_t>(j) * size + i] = 1;
  }
};

EdgeMask mask_from(int node_count, const std::vector<Edge>& excluded) {
  EdgeMask mask(node_count);
  for (const auto& e : excluded) {
    if (e.u == e.v || e.u < 0 || e.v < 0 || e.u >= node_count || e.v >= node_count) {
      fail(errc::index_out_of_range, "excluded edge (" + std::to_string(e.u) + ", " +
                                         std::to_string(e.v) + ") is not a valid pair");
    }
    mask.set(e.u, e.v);
  }
  return mask;
}

struct WeightedPair {
  double w;
  int i;
  int j;

  bool operator<(const WeightedPair& o) const {
    if (w != o.w) return w < o.w;
    if (i != o.i) return i < o.i;
    return j < o.j;
  }
};

std::vector<WeightedPair> sorted_pairs(const DistanceMatrix& d) {
  std::vector<WeightedPair> pairs;
  pairs.reserve(static_cast<std::size_t>(d.size) * (d.size - 1) / 2);
  for (int i = 0; i < d.size; ++i) {
    for (int j = i + 1; j < d.size; ++j) {
      pairs.push_back({d.at(i, j), i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  bool join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

std::vector<Edge> kruskal(const std::vector<WeightedPair>& pairs, int node_count,
                          const EdgeMask& mask) {
  UnionFind uf(node_count);
  std::vector<Edge> tree;
  tree.reserve(node_count - 1);
  for (const auto& p : pairs) {
    if (mask.test(p.i, p.j)) continue;
    if (uf.join(p.i, p.j)) {
      tree.push_back({p.i, p.j});
      if (static_cast<int>(tree.size()) == node_count - 1) break;
    }
  }
  return tree;
}

}  // namespace

SimilarityGraph minimum_spanning_tree(const DistanceMatrix& d, const std::vector<Edge>& excluded) {
  if (d.size < 2) fail(errc::too_few_nodes, "spanning tree needs at least 2 nodes");
  EdgeMask mask = mask_from(d.size, excluded);
  std::vector<Edge> tree = kruskal(sorted_pairs(d), d.size, mask);
  if (static_cast<int>(tree.size()) != d.size - 1) {
    fail(errc::disconnected, "non-excluded pairs do not connect all " + std::to_string(d.size) +
                                 " nodes");
  }
  return validate_graph(d.size, std::move(tree));
}

std::vector<SimilarityGraph> kmst_rounds(const DistanceMatrix& d, int k) {
  if (k < 1) fail(errc::invalid_argument, "k must be >= 1");
  if (d.size < 2) fail(errc::too_few_nodes, "spanning tree needs at least 2 nodes");
  std::vector<WeightedPair> pairs = sorted_pairs(d);
  EdgeMask mask(d.size);
  std::vector<SimilarityGraph> rounds;
  rounds.reserve(k);
  for (int round = 1; round <= k; ++round) {
    std::vector<Edge> tree = kruskal(pairs, d.size, mask);
    if (static_cast<int>(tree.size()) != d.size - 1) {
      fail(errc::disconnected,
           "round " + std::to_string(round) + ": remaining pairs cannot span all nodes");
    }
    for (const auto& e : tree) mask.set(e.u, e.v);
    rounds.push_back(validate_graph(d.size, std::move(tree)));
  }
  return rounds;
}

SimilarityGraph merge_rounds(int node_count, const std::vector<SimilarityGraph>& rounds,
                             int first_k) {
  std::vector<Edge> edges;
  for (int r = 0; r < first_k && r < static_cast<int>(rounds.size()); ++r) {
    edges.insert(edges.end(), rounds[r].edges.begin(), rounds[r].edges.end());
  }
  return validate_graph(node_count, std::move(edges));
}

SimilarityGraph build_kmst(const DistanceMatrix& d, int k) {
  if (k < 1) fail(errc::invalid_argument, "k must be >= 1");
  if (d.size < 2) fail(errc::too_few_nodes, "spanning tree needs at least 2 nodes");
  // k trees would use at least every pair: the k-MST exhausts the complete
  // graph, so return it directly instead of failing a late round.
  std::int64_t n = d.size;
  if (static_cast<std::int64_t>(k) * (n - 1) >= n * (n - 1) / 2) {
    std::vector<Edge> all;
    all.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (int i = 0; i < d.size; ++i) {
      for (int j = i + 1; j < d.size; ++j) all.push_back({i, j});
    }
    return validate_graph(d.size, std::move(all));
  }
  auto rounds = kmst_rounds(d, k);
  return merge_rounds(d.size, rounds, k);
}

SimilarityGraph build_knn(const DistanceMatrix& d, int k) {
  if (d.size < 2) fail(errc::too_few_nodes, "nearest neighbors need at least 2 nodes");
  if (k < 1 || k > d.size - 1) {
    fail(errc::k_too_large, "knn needs 1 <= k <= N-1, got k=" + std::to_string(k) +
                                " with N=" + std::to_string(d.size));
  }
  EdgeMask seen(d.size);
  std::vector<Edge> edges;
  std::vector<WeightedPair> row;
  row.reserve(d.size - 1);
  for (int i = 0; i < d.size; ++i) {
    row.clear();
    for (int j = 0; j < d.size; ++j) {
      if (j != i) row.push_back({d.at(i, j), j, 0});
    }
    std::sort(row.begin(), row.end());
    for (int t = 0; t < k; ++t) {
      int j = row[t].i;
      int u = std::min(i, j), v = std::max(i, j);
      if (!seen.test(u, v)) {
        seen.set(u, v);
        edges.push_back({u, v});
      }
    }
  }
  return validate_graph(d.size, std::move(edges));
}

namespace {

// Maximum-weight perfect matching on a general graph, O(V^3), integer
// weights, 1-indexed internally. Classic primal-dual blossom algorithm:
// lab[] holds vertex and blossom duals, st[] maps a vertex to the
// outermost blossom containing it, flower[] stores blossom cycles with the
// base first, and g[x][y] remembers which real pair realizes the edge
// between two (possibly contracted) nodes. Weight 0 marks a non-edge.
// This is the perfect-matching variant: duals may run negative and a
// phase that cannot create any new tight edge means no perfect matching
// exists at all.
struct Blossom {
  using ll = std::int64_t;
  static constexpr ll kInf = std::numeric_limits<ll>::max() / 4;

  struct E {
    int u = 0, v = 0;
    ll w = 0;
  };

  int n, n_x, t = 0;
  std::vector<std::vector<E>> g;
  std::vector<ll> lab;
  std::vector<int> match, slack, st, pa, S, vis;
  std::vector<std::vector<int>> flower, flower_from;
  std::deque<int> q;

  explicit Blossom(int n_) : n(n_), n_x(n_) {
    int cap = 2 * n + 2;
    g.assign(cap, std::vector<E>(cap));
    lab.assign(cap, 0);
    match.assign(cap, 0);
    slack.assign(cap, 0);
    st.assign(cap, 0);
    pa.assign(cap, 0);
    S.assign(cap, 0);
    vis.assign(cap, 0);
    flower.assign(cap, {});
    flower_from.assign(cap, std::vector<int>(n + 1, 0));
    for (int u = 1; u <= n; ++u) {
      for (int v = 1; v <= n; ++v) g[u][v] = E{u, v, 0};
    }
  }

  void set_weight(int u, int v, ll w) {  // 1-indexed
    g[u][v].w = w;
    g[v][u].w = w;
  }

  ll e_delta(const E& e) const { return lab[e.u] + lab[e.v] - g[e.u][e.v].w * 2; }

  void update_slack(int u, int x) {
    if (!slack[x] || e_delta(g[u][x]) < e_delta(g[slack[x]][x])) slack[x] = u;
  }

  void set_slack(int x) {
    slack[x] = 0;
    for (int u = 1; u <= n; ++u) {
      if (g[u][x].w > 0 && st[u] != x && S[st[u]] == 0) update_slack(u, x);
    }
  }

  void q_push(int x) {
    if (x <= n) {
      q.push_back(x);
    } else {
      for (int y : flower[x]) q_push(y);
    }
  }

  void set_st(int x, int b) {
    st[x] = b;
    if (x > n) {
      for (int y : flower[x]) set_st(y, b);
    }
  }

  int get_pr(int b, int xr) {
    int pr = static_cast<int>(std::find(flower[b].begin(), flower[b].end(), xr) -
                              flower[b].begin());
    if (pr % 2 == 1) {
      std::reverse(flower[b].begin() + 1, flower[b].end());
      return static_cast<int>(flower[b].size()) - pr;
    }
    return pr;
  }

  void set_match(int u, int v) {
    match[u] = g[u][v].v;
    if (u > n) {
      E e = g[u][v];
      int xr = flower_from[u][e.u];
      int pr = get_pr(u, xr);
      for (int i = 0; i < pr; ++i) set_match(flower[u][i], flower[u][i ^ 1]);
      set_match(xr, v);
      std::rotate(flower[u].begin(), flower[u].begin() + pr, flower[u].end());
    }
  }

  void augment(int u, int v) {
    for (;;) {
      int xnv = st[match[u]];
      set_match(u, v);
      if (!xnv) return;
      set_match(xnv, st[pa[xnv]]);
      u = st[pa[xnv]];
      v = xnv;
    }
  }

  int get_lca(int u, int v) {
    for (++t; u || v; std::swap(u, v)) {
      if (u == 0) continue;
      if (vis[u] == t) return u;
      vis[u] = t;
      u = st[match[u]];
      if (u) u = st[pa[u]];
    }
    return 0;
  }

  void add_blossom(int u, int lca, int v) {
    int b = n + 1;
    while (b <= n_x && st[b]) ++b;
    if (b > n_x) ++n_x;
    lab[b] = 0;
    S[b] = 0;
    match[b] = match[lca];
    flower[b].clear();
    flower[b].push_back(lca);
    for (int x = u, y; x != lca; x = st[pa[y]]) {
      flower[b].push_back(x);
      flower[b].push_back(y = st[match[x]]);
      q_push(y);
    }
    std::reverse(flower[b].begin() + 1, flower[b].end());
    for (int x = v, y; x != lca; x = st[pa[y]]) {
      flower[b].push_back(x);
      flower[b].push_back(y = st[match[x]]);
      q_push(y);
    }
    set_st(b, b);
    for (int x = 1; x <= n_x; ++x) {
      g[b][x].w = 0;
      g[x][b].w = 0;
    }
    for (int x = 1; x <= n; ++x) flower_from[b][x] = 0;
    for (int xs : flower[b]) {
      for (int x = 1; x <= n_x; ++x) {
        // Only genuine edges may represent b-x; duals can run negative
        // here, so a weight-0 hole must never win the comparison.
        if (g[xs][x].w > 0 && (g[b][x].w == 0 || e_delta(g[xs][x]) < e_delta(g[b][x]))) {
          g[b][x] = g[xs][x];
          g[x][b] = g[x][xs];
        }
      }
      for (int x = 1; x <= n; ++x) {
        if (flower_from[xs][x]) flower_from[b][x] = xs;
      }
    }
    set_slack(b);
  }

  void expand_blossom(int b) {
    for (int xs : flower[b]) set_st(xs, xs);
    int xr = flower_from[b][g[b][pa[b]].u];
    int pr = get_pr(b, xr);
    for (int i = 0; i < pr; i += 2) {
      int xs = flower[b][i];
      int xns = flower[b][i + 1];
      pa[xs] = g[xns][xs].u;
      S[xs] = 1;
      S[xns] = 0;
      slack[xs] = 0;
      set_slack(xns);
      q_push(xns);
    }
    S[xr] = 1;
    pa[xr] = pa[b];
    for (std::size_t i = pr + 1; i < flower[b].size(); ++i) {
      int xs = flower[b][i];
      S[xs] = -1;
      set_slack(xs);
    }
    st[b] = 0;
  }

  bool on_found_edge(const E& e) {
    int u = st[e.u];
    int v = st[e.v];
    if (S[v] == -1) {
      pa[v] = e.u;
      S[v] = 1;
      int nu = st[match[v]];
      slack[v] = 0;
      slack[nu] = 0;
      S[nu] = 0;
      q_push(nu);
    } else if (S[v] == 0) {
      int lca = get_lca(u, v);
      if (!lca) {
        augment(u, v);
        augment(v, u);
        return true;
      }
      add_blossom(u, lca, v);
    }
    return false;
  }

  // Grows the alternating forest until it augments once (true) or no
  // progress is possible at any dual value (false: no perfect matching).
  bool matching() {
    std::fill(S.begin(), S.begin() + n_x + 1, -1);
    std::fill(slack.begin(), slack.begin() + n_x + 1, 0);
    q.clear();
    for (int x = 1; x <= n_x; ++x) {
      if (st[x] == x && !match[x]) {
        pa[x] = 0;
        S[x] = 0;
        q_push(x);
      }
    }
    if (q.empty()) return false;
    for (;;) {
      while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        if (S[st[u]] == 1) continue;
        for (int v = 1; v <= n; ++v) {
          if (g[u][v].w > 0 && st[u] != st[v]) {
            if (e_delta(g[u][v]) == 0) {
              if (on_found_edge(g[u][v])) return true;
            } else {
              update_slack(u, st[v]);
            }
          }
        }
      }
      ll d = kInf;
      for (int b = n + 1; b <= n_x; ++b) {
        if (st[b] == b && S[b] == 1) d = std::min(d, lab[b] / 2);
      }
      for (int x = 1; x <= n_x; ++x) {
        if (st[x] == x && slack[x]) {
          if (S[x] == -1) {
            d = std::min(d, e_delta(g[slack[x]][x]));
          } else if (S[x] == 0) {
            d = std::min(d, e_delta(g[slack[x]][x]) / 2);
          }
        }
      }
      if (d >= kInf) return false;
      for (int u = 1; u <= n; ++u) {
        if (S[st[u]] == 0) {
          lab[u] -= d;
        } else if (S[st[u]] == 1) {
          lab[u] += d;
        }
      }
      for (int b = n + 1; b <= n_x; ++b) {
        if (st[b] == b) {
          if (S[b] == 0) {
            lab[b] += d * 2;
          } else if (S[b] == 1) {
            lab[b] -= d * 2;
          }
        }
      }
      q.clear();
      for (int x = 1; x <= n_x; ++x) {
        if (st[x] == x && slack[x] && st[slack[x]] != x && e_delta(g[slack[x]][x]) == 0) {
          if (on_found_edge(g[slack[x]][x])) return true;
        }
      }
      for (int b = n + 1; b <= n_x; ++b) {
        if (st[b] == b && S[b] == 1 && lab[b] == 0) expand_blossom(b);
      }
    }
  }

  // Returns the matched pairs (1-indexed) or an empty list when no
  // perfect matching exists.
  std::vector<std::pair<int, int>> solve_perfect() {
    std::iota(st.begin(), st.begin() + n + 1, 0);
    n_x = n;
    t = 0;
    ll w_max = 0;
    for (int u = 1; u <= n; ++u) {
      match[u] = 0;
      flower[u].clear();
      for (int v = 1; v <= n; ++v) {
        flower_from[u][v] = (u == v ? u : 0);
        w_max = std::max(w_max, g[u][v].w);
      }
    }
    for (int u = 1; u <= n; ++u) lab[u] = w_max;
    int matches = 0;
    while (matches * 2 < n) {
      if (!matching()) return {};
      ++matches;
    }
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(n / 2);
    for (int u = 1; u <= n; ++u) {
      if (match[u] > u) pairs.push_back({u, match[u]});
    }
    return pairs;
  }
};

// Deterministic map from real distances to positive integer weights for
// the maximizing blossom: w = round((max_d - d) * scale) + 1 with scale
// chosen so max_d lands near 2^40. Quantization moves any matching's cost
// by at most ~1e-12 relative; exact comparisons stay inside the integer
// algorithm.
std::vector<std::pair<int, int>> min_weight_pairs(const DistanceMatrix& d, const EdgeMask& mask) {
  const int n = d.size;
  Blossom blossom(n);
  double max_d = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!mask.test(i, j)) max_d = std::max(max_d, d.at(i, j));
    }
  }
  double scale = max_d > 0.0 ? std::ldexp(1.0, 40) / max_d : 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (mask.test(i, j)) continue;
      auto w = static_cast<std::int64_t>(std::llround((max_d - d.at(i, j)) * scale)) + 1;
      blossom.set_weight(i + 1, j + 1, w);
    }
  }
  return blossom.solve_perfect();
}

SimilarityGraph matching_round(const DistanceMatrix& d, const EdgeMask& real_mask, int round) {
  const int n = d.size;
  std::string round_note = round > 0 ? "round " + std::to_string(round) + ": " : "";
  std::vector<std::pair<int, int>> pairs;
  if (n % 2 == 0) {
    pairs = min_weight_pairs(d, real_mask);
  } else {
    // Augment with a pseudo node at distance 0 to everything; the pair
    // holding it is dropped below. Exclusions only cover real pairs.
    DistanceMatrix aug{n + 1, std::vector<double>(static_cast<std::size_t>(n + 1) * (n + 1), 0.0)};
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) aug.at(i, j) = d.at(i, j);
    }
    EdgeMask aug_mask(n + 1);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (real_mask.test(i, j)) aug_mask.set(i, j);
      }
    }
    pairs = min_weight_pairs(aug, aug_mask);
  }
  if (pairs.empty() && n > 0) {
    fail(errc::no_perfect_matching,
         round_note + "no perfect matching exists among the allowed pairs");
  }
  std::vector<Edge> edges;
  for (auto [a, b] : pairs) {
    int u = a - 1, v = b - 1;
    if (u >= n || v >= n) continue;  // pseudo pair
    edges.push_back({u, v});
  }
  return validate_graph(n, std::move(edges));
}

}  // namespace

SimilarityGraph min_weight_perfect_matching(const DistanceMatrix& d,
                                            const std::vector<Edge>& excluded) {
  if (d.size < 2) fail(errc::too_few_nodes, "perfect matching needs at least 2 nodes");
  if (d.size % 2 != 0) {
    fail(errc::invalid_argument,
         "perfect matching needs an even node count, got " + std::to_string(d.size));
  }
  return matching_round(d, mask_from(d.size, excluded), 0);
}

std::vector<SimilarityGraph> kmdp_rounds(const DistanceMatrix& d, int k) {
  if (k < 1) fail(errc::invalid_argument, "k must be >= 1");
  if (d.size < 2) fail(errc::too_few_nodes, "matching needs at least 2 nodes");
  EdgeMask mask(d.size);
  std::vector<SimilarityGraph> rounds;
  rounds.reserve(k);
  for (int round = 1; round <= k; ++round) {
    SimilarityGraph g = matching_round(d, mask, round);
    for (const auto& e : g.edges) mask.set(e.u, e.v);
    rounds.push_back(std::move(g));
  }
  return rounds;
}

SimilarityGraph build_kmdp(const DistanceMatrix& d, int k) {
  auto rounds = kmdp_rounds(d, k);
  return merge_rounds(d.size, rounds, k);
}

SimilarityGraph build_graph(const DistanceMatrix& d, const GraphSpec& spec) {
  switch (spec.kind) {
    case GraphKind::kmst: return build_kmst(d, spec.k);
    case GraphKind::knn: return build_knn(d, spec.k);
    case GraphKind::kmdp: return build_kmdp(d, spec.k);
    case GraphKind::external: return build_graph_external(spec, d.size);
  }
  fail(errc::invalid_argument, "unknown graph kind");
}

SimilarityGraph build_graph_external(const GraphSpec& spec, int node_count) {
  return read_edge_list(spec.path, node_count);
}

}  // namespace graphtest
