#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphtest/graph.hpp"

namespace graphtest {

// Assignment of each pooled observation to sample 1 (m nodes) or sample 2
// (n nodes). Sample 1 is always the first-listed sample; the order matters
// because the weighted statistic cross-weights each within-sample count by
// the *other* sample's proportion.
struct TwoSampleLayout {
  std::vector<int> labels;  // 1 or 2 per node
  int m = 0;
  int n = 0;

  int total() const { return m + n; }
  double p() const { return static_cast<double>(m) / (m + n); }
  double q() const { return static_cast<double>(n) / (m + n); }
  double p_tilde() const { return static_cast<double>(m - 1) / (m + n - 2); }
  double q_tilde() const { return static_cast<double>(n - 1) / (m + n - 2); }
};

// Validates label values and enforces m, n >= 2 (the moment formulas'
// denominators need it).
TwoSampleLayout make_layout(std::vector<int> labels);

// R (between-sample), R1 (within sample 1), R2 (within sample 2);
// R + R1 + R2 = |G| always.
struct EdgeCounts {
  std::int64_t r_between = 0;
  std::int64_t r1_within = 0;
  std::int64_t r2_within = 0;
};

EdgeCounts count_edges(const SimilarityGraph& graph, const TwoSampleLayout& layout);

// Exact first and second moments of the edge counts under the permutation
// null, which places probability 1/C(N,m) on every labeling with the given
// sample sizes. Everything here is closed-form in |G|, sum(deg^2), m, n.
// The sample sizes are echoed so downstream standardizations can rebuild
// the weights without carrying the layout around.
struct PermutationMoments {
  int m = 0;
  int n = 0;
  double e_r = 0.0;
  double var_r = 0.0;
  double e_r1 = 0.0;
  double e_r2 = 0.0;
  double var_r1 = 0.0;
  double var_r2 = 0.0;
  double cov_r1_r2 = 0.0;
  double e_rw = 0.0;
  double var_rw = 0.0;
  double e_rwt = 0.0;
  double var_rwt = 0.0;
};

PermutationMoments permutation_moments(const DegreeStats& gs, const TwoSampleLayout& layout);

// Var(a*R1 + (1-a)*R2) under the permutation null. Minimized at
// a = (n-1)/(N-2), where it equals var_rwt; a = q gives var_rw; a = 1 and
// a = 0 give Var(R1) and Var(R2).
double linear_combo_variance(const DegreeStats& gs, const TwoSampleLayout& layout, double a);

// R_w = q*R1 + p*R2 and R~_w = q~*R1 + p~*R2.
struct WeightedCounts {
  double rw = 0.0;
  double rw_tilde = 0.0;
};

WeightedCounts weighted_statistics(const EdgeCounts& counts, const TwoSampleLayout& layout);

// Mahalanobis deviation of (R1, R2) from its null mean:
// S = dev' * Sigma^-1 * dev. Errors with SingularCovariance on flat
// graphs, where (R1, R2) is affinely degenerate and Sigma is singular.
double generalized_statistic(const EdgeCounts& counts, const PermutationMoments& mom);

// Standardized weighted count, standardized within-count difference, and
// the max-type statistic M = max(Z_w, |Z_diff|). Z_diff uses the exact
// finite-sample variance Var(R1) + Var(R2) - 2 Cov(R1, R2).
struct MaxTypeParts {
  double z_w = 0.0;
  double z_diff = 0.0;
  double m_stat = 0.0;
};

MaxTypeParts zw_zdiff(const EdgeCounts& counts, const PermutationMoments& mom);

enum class StatisticKind { edge, weighted, weighted_tilde, generalized, maxtype };

const char* statistic_name(StatisticKind kind);
StatisticKind statistic_from_name(const std::string& name);
std::vector<StatisticKind> all_statistics();

// True for statistics whose small values are evidence against the null
// (only the raw between-sample count); the rest reject large values.
bool statistic_rejects_small(StatisticKind kind);

// Raw value of one statistic for a labeling, given the moments (which are
// labeling-invariant, so a permutation loop computes them once).
double statistic_value(StatisticKind kind, const EdgeCounts& counts,
                       const PermutationMoments& mom, const TwoSampleLayout& layout);

}  // namespace graphtest
