#include "graphtest/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "graphtest/parallel.hpp"
#include "graphtest/rng.hpp"

namespace graphtest {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// P(max(Z1, |Z2|) <= c) for independent standard normals.
double maxtype_cdf(double c) {
  if (c <= 0.0) return 0.0;
  double phi = std_normal_cdf(c);
  return phi * (2.0 * phi - 1.0);
}

struct MaxTypeMoments {
  double mean;
  double sd;
};

// Simpson quadrature of the tail integrals E[M] = integral of 1 - F and
// E[M^2] = integral of 2c(1 - F); the integrand is below 1e-30 by c = 12.
MaxTypeMoments compute_maxtype_moments() {
  const double hi = 12.0;
  const int steps = 24000;  // even
  const double h = hi / steps;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i <= steps; ++i) {
    double c = i * h;
    double w = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    double tail = 1.0 - maxtype_cdf(c);
    s1 += w * tail;
    s2 += w * 2.0 * c * tail;
  }
  double mean = s1 * h / 3.0;
  double second = s2 * h / 3.0;
  return {mean, std::sqrt(second - mean * mean)};
}

}  // namespace

void maxtype_null_moments(double* mean, double* sd) {
  static const MaxTypeMoments cached = compute_maxtype_moments();
  *mean = cached.mean;
  *sd = cached.sd;
}

double asymptotic_pvalue(StatisticKind kind, double value) {
  switch (kind) {
    case StatisticKind::edge:
      return std_normal_cdf(value);
    case StatisticKind::weighted:
    case StatisticKind::weighted_tilde:
      return 1.0 - std_normal_cdf(value);
    case StatisticKind::generalized:
      // Chi-square(2) upper tail has the closed form exp(-S/2).
      return value <= 0.0 ? 1.0 : std::exp(-value / 2.0);
    case StatisticKind::maxtype:
      return 1.0 - maxtype_cdf(value);
  }
  fail(errc::invalid_argument, "unknown statistic kind");
}

double asymptotic_pvalue(const TestResult& result) {
  bool raw = result.kind == StatisticKind::generalized || result.kind == StatisticKind::maxtype;
  return asymptotic_pvalue(result.kind, raw ? result.observed : result.z_score);
}

namespace {

void check_sizes(const SimilarityGraph& graph, const TwoSampleLayout& layout) {
  if (layout.total() != graph.node_count) {
    fail(errc::length_mismatch, "layout labels " + std::to_string(layout.total()) +
                                    " nodes but the graph has " +
                                    std::to_string(graph.node_count));
  }
}

double checked_sd(double variance, const char* what) {
  if (!(variance > 0.0)) {
    fail(errc::zero_variance,
         std::string(what) + " has zero null variance on this graph; the "
                             "standardized statistic is undefined");
  }
  return std::sqrt(variance);
}

}  // namespace

TestResult evaluate_statistic(const SimilarityGraph& graph, const TwoSampleLayout& layout,
                              StatisticKind kind) {
  check_sizes(graph, layout);
  DegreeStats gs = degree_stats(graph);
  if (gs.edge_count == 0) {
    fail(errc::degenerate_graph, "the similarity graph has no edges");
  }
  PermutationMoments mom = permutation_moments(gs, layout);
  EdgeCounts counts = count_edges(graph, layout);

  TestResult r;
  r.kind = kind;
  r.reject_small = statistic_rejects_small(kind);
  switch (kind) {
    case StatisticKind::edge:
      r.observed = static_cast<double>(counts.r_between);
      r.null_mean = mom.e_r;
      r.null_sd = checked_sd(mom.var_r, "the between-sample count");
      break;
    case StatisticKind::weighted:
      r.observed = weighted_statistics(counts, layout).rw;
      r.null_mean = mom.e_rw;
      r.null_sd = checked_sd(mom.var_rw, "the weighted count");
      break;
    case StatisticKind::weighted_tilde:
      r.observed = weighted_statistics(counts, layout).rw_tilde;
      r.null_mean = mom.e_rwt;
      r.null_sd = checked_sd(mom.var_rwt, "the weighted count");
      break;
    case StatisticKind::generalized:
      r.observed = generalized_statistic(counts, mom);
      // Exact null mean: E[dev' Sigma^-1 dev] = trace(I_2) = 2. The SD is
      // the chi-square(2) value; z is then informational, p-values do not
      // use it.
      r.null_mean = 2.0;
      r.null_sd = 2.0;
      break;
    case StatisticKind::maxtype: {
      r.observed = zw_zdiff(counts, mom).m_stat;
      maxtype_null_moments(&r.null_mean, &r.null_sd);
      break;
    }
  }
  r.z_score = (r.observed - r.null_mean) / r.null_sd;
  return r;
}

std::vector<TestResult> permutation_pvalues(const SimilarityGraph& graph,
                                            const TwoSampleLayout& layout,
                                            const std::vector<StatisticKind>& kinds,
                                            const PermutationConfig& config) {
  check_sizes(graph, layout);
  if (config.n_permutations < 1) {
    fail(errc::invalid_argument, "n_permutations must be >= 1");
  }
  if (kinds.empty()) fail(errc::invalid_argument, "no statistics requested");

  std::vector<TestResult> results;
  results.reserve(kinds.size());
  for (StatisticKind kind : kinds) results.push_back(evaluate_statistic(graph, layout, kind));

  DegreeStats gs = degree_stats(graph);
  PermutationMoments mom = permutation_moments(gs, layout);
  const int n_kinds = static_cast<int>(kinds.size());
  const int nperm = config.n_permutations;
  const int total = layout.total();
  const int m = layout.m;

  // Permutation i derives its own substream, so the extreme/not-extreme
  // outcome per (i, kind) is independent of scheduling; the counts below
  // are sums over i and therefore thread-count invariant.
  std::vector<std::uint8_t> extreme(static_cast<std::size_t>(nperm) * n_kinds, 0);
  int workers = config.parallel ? resolve_threads(config.threads) : 1;
  parallel_for(nperm, workers, [&](std::int64_t i) {
    Rng rng(substream(config.seed, static_cast<std::uint64_t>(i)));
    std::vector<int> order(total);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle_prefix(order, m);
    std::vector<char> in_first(total, 0);
    for (int t = 0; t < m; ++t) in_first[order[t]] = 1;

    EdgeCounts c;
    for (const auto& e : graph.edges) {
      int hits = in_first[e.u] + in_first[e.v];
      if (hits == 2) {
        ++c.r1_within;
      } else if (hits == 0) {
        ++c.r2_within;
      } else {
        ++c.r_between;
      }
    }
    for (int k = 0; k < n_kinds; ++k) {
      double v = statistic_value(kinds[k], c, mom, layout);
      bool hit = results[k].reject_small ? (v <= results[k].observed)
                                         : (v >= results[k].observed);
      extreme[static_cast<std::size_t>(i) * n_kinds + k] = hit ? 1 : 0;
    }
  });

  for (int k = 0; k < n_kinds; ++k) {
    std::int64_t hits = 0;
    for (int i = 0; i < nperm; ++i) hits += extreme[static_cast<std::size_t>(i) * n_kinds + k];
    results[k].p_permutation = (1.0 + static_cast<double>(hits)) / (1.0 + nperm);
    results[k].seed = config.seed;
    results[k].n_permutations = nperm;
  }
  return results;
}

TestResult permutation_pvalue(const SimilarityGraph& graph, const TwoSampleLayout& layout,
                              StatisticKind kind, const PermutationConfig& config) {
  return permutation_pvalues(graph, layout, {kind}, config)[0];
}

namespace {

double binomial_or_fail(int n, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) {
    c *= static_cast<double>(n - i) / (i + 1);
    if (c > 1e15) return c;  // caller range-checks
  }
  return c;
}

}  // namespace

ExhaustiveNull exhaustive_null(const SimilarityGraph& graph, int m) {
  const int n_nodes = graph.node_count;
  if (m < 2 || n_nodes - m < 2) {
    fail(errc::too_few_nodes, "exhaustive null needs 2 <= m <= N-2");
  }
  if (binomial_or_fail(n_nodes, m) > 1e6) {
    fail(errc::too_large, "C(" + std::to_string(n_nodes) + ", " + std::to_string(m) +
                              ") labelings is beyond the exhaustive enumeration cap");
  }

  ExhaustiveNull null;
  null.node_count = n_nodes;
  null.m = m;
  null.edge_count = graph.edge_count();

  std::vector<char> in_first(n_nodes, 0);
  std::vector<int> pick(m);
  std::iota(pick.begin(), pick.end(), 0);
  for (;;) {
    std::fill(in_first.begin(), in_first.end(), 0);
    for (int v : pick) in_first[v] = 1;
    int r1 = 0, r2 = 0;
    for (const auto& e : graph.edges) {
      int hits = in_first[e.u] + in_first[e.v];
      if (hits == 2) {
        ++r1;
      } else if (hits == 0) {
        ++r2;
      }
    }
    ++null.cells[{r1, r2}];
    ++null.total;

    // next combination in lexicographic order
    int i = m - 1;
    while (i >= 0 && pick[i] == n_nodes - m + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < m; ++j) pick[j] = pick[j - 1] + 1;
  }
  return null;
}

PermutationMoments ExhaustiveNull::exact_moments() const {
  const int n_sample2 = node_count - m;
  const double p = static_cast<double>(m) / node_count;
  const double q = static_cast<double>(n_sample2) / node_count;
  const double pt = static_cast<double>(m - 1) / (node_count - 2);
  const double qt = static_cast<double>(n_sample2 - 1) / (node_count - 2);

  long double s_r = 0, s_rr = 0, s_1 = 0, s_11 = 0, s_2 = 0, s_22 = 0, s_12 = 0;
  long double s_w = 0, s_ww = 0, s_t = 0, s_tt = 0;
  for (const auto& [cell, count] : cells) {
    long double w = count;
    long double r1 = cell.first;
    long double r2 = cell.second;
    long double r = edge_count - r1 - r2;
    long double rw = q * r1 + p * r2;
    long double rt = qt * r1 + pt * r2;
    s_r += w * r;
    s_rr += w * r * r;
    s_1 += w * r1;
    s_11 += w * r1 * r1;
    s_2 += w * r2;
    s_22 += w * r2 * r2;
    s_12 += w * r1 * r2;
    s_w += w * rw;
    s_ww += w * rw * rw;
    s_t += w * rt;
    s_tt += w * rt * rt;
  }
  long double t = total;
  PermutationMoments out;
  out.m = m;
  out.n = n_sample2;
  out.e_r = static_cast<double>(s_r / t);
  out.var_r = static_cast<double>(s_rr / t - (s_r / t) * (s_r / t));
  out.e_r1 = static_cast<double>(s_1 / t);
  out.e_r2 = static_cast<double>(s_2 / t);
  out.var_r1 = static_cast<double>(s_11 / t - (s_1 / t) * (s_1 / t));
  out.var_r2 = static_cast<double>(s_22 / t - (s_2 / t) * (s_2 / t));
  out.cov_r1_r2 = static_cast<double>(s_12 / t - (s_1 / t) * (s_2 / t));
  out.e_rw = static_cast<double>(s_w / t);
  out.var_rw = static_cast<double>(s_ww / t - (s_w / t) * (s_w / t));
  out.e_rwt = static_cast<double>(s_t / t);
  out.var_rwt = static_cast<double>(s_tt / t - (s_t / t) * (s_t / t));
  return out;
}

BootstrapMoments bootstrap_moments(const DegreeStats& gs, const TwoSampleLayout& layout) {
  const double g = static_cast<double>(gs.edge_count);
  const double deg_sq = static_cast<double>(gs.degree_square_sum);
  const double p = layout.p();
  const double q = layout.q();

  BootstrapMoments out;
  out.e_b_r1 = p * p * g;
  out.e_b_r2 = q * q * g;
  out.var_b_r1 = p * p * q * q * g + p * p * p * q * deg_sq;
  out.var_b_r2 = p * p * q * q * g + p * q * q * q * deg_sq;
  out.cov_b = p * p * q * q * (g - deg_sq);
  out.mu_b = p * q * g;
  out.sigma_b_sq = p * p * q * q * g;

  PermutationMoments mom = permutation_moments(gs, layout);
  out.mu_p = mom.e_rw;
  out.sigma_p_sq = mom.var_rw;
  return out;
}

}  // namespace graphtest
