#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "graphtest/stats.hpp"

namespace graphtest {

struct PermutationConfig {
  int n_permutations = 1000;
  std::uint64_t seed = 0;
  bool parallel = false;
  int threads = 0;  // worker cap when parallel; 0 means hardware count
};

// One statistic's outcome. z_score = (observed - null_mean)/null_sd always
// holds; for the generalized statistic the null mean is exactly 2 (trace
// identity under the exact covariance) with the asymptotic chi-square(2)
// SD, and for the max-type statistic mean/SD come from its asymptotic
// null; p-values never depend on those two summaries.
struct TestResult {
  StatisticKind kind = StatisticKind::edge;
  double observed = 0.0;
  double null_mean = 0.0;
  double null_sd = 0.0;
  double z_score = 0.0;
  std::optional<double> p_permutation;
  std::optional<double> p_asymptotic;
  bool reject_small = false;  // direction: true = lower tail
  std::uint64_t seed = 0;
  int n_permutations = 0;
};

// Phi(x) with absolute error far below 1e-10 (backed by erfc).
double std_normal_cdf(double x);

// Asymptotic-null tail probability. `value` is the z-score for the edge
// and weighted kinds, S for generalized, M for maxtype. The overload
// picks the right field off a TestResult.
double asymptotic_pvalue(StatisticKind kind, double value);
double asymptotic_pvalue(const TestResult& result);

// Mean and SD of max(Z_w, |Z_diff|) when both components are independent
// standard normals; cached quadrature of the closed-form CDF.
void maxtype_null_moments(double* mean, double* sd);

// Observed statistic plus its null mean/SD/z, no p-values yet.
TestResult evaluate_statistic(const SimilarityGraph& graph, const TwoSampleLayout& layout,
                              StatisticKind kind);

// Monte Carlo permutation test: labelings drawn as uniform m-subsets via
// seeded shuffles, p = (1 + #extreme)/(1 + n_permutations) with ties
// counted as extreme. Permutation i uses substream(seed, i), so the result
// is bit-identical for a fixed seed no matter how many threads run.
TestResult permutation_pvalue(const SimilarityGraph& graph, const TwoSampleLayout& layout,
                              StatisticKind kind, const PermutationConfig& config);

// Same engine, several statistics sharing one set of permutation draws.
// Each entry equals the corresponding single-statistic call exactly.
std::vector<TestResult> permutation_pvalues(const SimilarityGraph& graph,
                                            const TwoSampleLayout& layout,
                                            const std::vector<StatisticKind>& kinds,
                                            const PermutationConfig& config);

// Full permutation-null distribution of (R1, R2): labeling counts per
// (r1, r2) cell over all C(N, m) subsets. The oracle for moments and for
// exact p-values; refuses instances with C(N, m) > 10^6.
struct ExhaustiveNull {
  int node_count = 0;
  int m = 0;
  std::int64_t edge_count = 0;
  std::map<std::pair<int, int>, std::uint64_t> cells;
  std::uint64_t total = 0;

  // Moments of the enumerated distribution, same shape as the analytic
  // ones so the two can be compared field by field.
  PermutationMoments exact_moments() const;

  // Exact tail probability of fn(counts) against `observed`.
  template <class Fn>
  double exact_pvalue(Fn&& fn, double observed, bool reject_small) const {
    long double hit = 0.0L;
    for (const auto& [cell, count] : cells) {
      EdgeCounts c{edge_count - cell.first - cell.second, cell.first, cell.second};
      double v = fn(c);
      bool extreme = reject_small ? (v <= observed) : (v >= observed);
      if (extreme) hit += static_cast<long double>(count);
    }
    return static_cast<double>(hit / static_cast<long double>(total));
  }
};

ExhaustiveNull exhaustive_null(const SimilarityGraph& graph, int m);

// Closed-form moments under the bootstrap null (each node independently
// assigned to sample 1 with probability m/N), plus the permutation-null
// mean/variance of R_w for side-by-side comparison.
struct BootstrapMoments {
  double e_b_r1 = 0.0;
  double e_b_r2 = 0.0;
  double var_b_r1 = 0.0;
  double var_b_r2 = 0.0;
  double cov_b = 0.0;
  double mu_b = 0.0;
  double sigma_b_sq = 0.0;
  double mu_p = 0.0;
  double sigma_p_sq = 0.0;
};

BootstrapMoments bootstrap_moments(const DegreeStats& gs, const TwoSampleLayout& layout);

}  // namespace graphtest
