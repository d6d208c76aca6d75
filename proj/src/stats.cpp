#include "graphtest/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace graphtest {

TwoSampleLayout make_layout(std::vector<int> labels) {
  TwoSampleLayout out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      ++out.m;
    } else if (labels[i] == 2) {
      ++out.n;
    } else {
      fail(errc::invalid_argument,
           "label at position " + std::to_string(i) + " must be 1 or 2, got " +
               std::to_string(labels[i]));
    }
  }
  if (out.m < 2 || out.n < 2) {
    fail(errc::too_few_nodes, "each sample needs at least 2 observations (m=" +
                                  std::to_string(out.m) + ", n=" + std::to_string(out.n) + ")");
  }
  out.labels = std::move(labels);
  return out;
}

EdgeCounts count_edges(const SimilarityGraph& graph, const TwoSampleLayout& layout) {
  if (static_cast<int>(layout.labels.size()) != graph.node_count) {
    fail(errc::length_mismatch,
         "labels cover " + std::to_string(layout.labels.size()) + " nodes but the graph has " +
             std::to_string(graph.node_count));
  }
  EdgeCounts out;
  for (const auto& e : graph.edges) {
    int a = layout.labels[e.u];
    int b = layout.labels[e.v];
    if (a != b) {
      ++out.r_between;
    } else if (a == 1) {
      ++out.r1_within;
    } else {
      ++out.r2_within;
    }
  }
  return out;
}

namespace {

struct MomentInputs {
  double g;       // |G|
  double dgap;    // D = sum(deg^2) - 4|G|^2/N
  double m, n, nn;  // sample sizes and N
  double factor;  // mn(m-1)(n-1) / (N(N-1)(N-2)(N-3))
  double tail;    // 2|G|^2 / (N(N-1))
};

MomentInputs moment_inputs(const DegreeStats& gs, const TwoSampleLayout& layout) {
  if (layout.m < 2 || layout.n < 2 || layout.total() < 4) {
    fail(errc::too_few_nodes, "permutation moments need m, n >= 2");
  }
  MomentInputs in;
  in.m = static_cast<double>(layout.m);
  in.n = static_cast<double>(layout.n);
  in.nn = static_cast<double>(layout.total());
  in.g = static_cast<double>(gs.edge_count);
  in.dgap = gs.flatness_gap;
  in.factor = in.m * in.n * (in.m - 1) * (in.n - 1) /
              (in.nn * (in.nn - 1) * (in.nn - 2) * (in.nn - 3));
  in.tail = 2.0 * in.g * in.g / (in.nn * (in.nn - 1));
  return in;
}

// The quadratic coefficient of D in Var(a*R1 + b*R2), b = 1 - a:
// g(a) = a^2 (m-2)/(n-1) + b^2 (n-2)/(m-1) - 2ab, minimized at
// a = (n-1)/(N-2).
double combo_gap_coefficient(double a, double m, double n) {
  double b = 1.0 - a;
  return a * a * (m - 2.0) / (n - 1.0) + b * b * (n - 2.0) / (m - 1.0) - 2.0 * a * b;
}

double combo_variance(const MomentInputs& in, double a) {
  return in.factor * (in.g + combo_gap_coefficient(a, in.m, in.n) * in.dgap - in.tail);
}

}  // namespace

PermutationMoments permutation_moments(const DegreeStats& gs, const TwoSampleLayout& layout) {
  MomentInputs in = moment_inputs(gs, layout);
  const double m = in.m, n = in.n, nn = in.nn, g = in.g;

  PermutationMoments out;
  out.m = layout.m;
  out.n = layout.n;
  out.e_r = 2.0 * m * n * g / (nn * (nn - 1));
  out.e_r1 = g * m * (m - 1) / (nn * (nn - 1));
  out.e_r2 = g * n * (n - 1) / (nn * (nn - 1));
  out.var_r = in.factor *
              (4.0 * g + ((n - m) * (n - m) - (nn - 2)) / ((m - 1) * (n - 1)) * in.dgap -
               4.0 * in.tail);

  // Sigma_R from the a-parameterized variance identity: a = 1 and a = 0
  // give the diagonal, and Var at a = 1/2 solves for the covariance.
  out.var_r1 = combo_variance(in, 1.0);
  out.var_r2 = combo_variance(in, 0.0);
  out.cov_r1_r2 = 2.0 * combo_variance(in, 0.5) - 0.5 * (out.var_r1 + out.var_r2);

  out.e_rw = m * n * (nn - 2) * g / (nn * nn * (nn - 1));
  out.var_rw = in.factor *
               (g -
                (m * n * nn - 2 * m * m - 2 * n * n + 2 * m * n) / (nn * nn * (m - 1) * (n - 1)) *
                    in.dgap -
                in.tail);
  out.e_rwt = g * (m - 1) * (n - 1) / ((nn - 1) * (nn - 2));
  out.var_rwt = in.factor * (g - in.dgap / (nn - 2) - in.tail);
  return out;
}

double linear_combo_variance(const DegreeStats& gs, const TwoSampleLayout& layout, double a) {
  return combo_variance(moment_inputs(gs, layout), a);
}

WeightedCounts weighted_statistics(const EdgeCounts& counts, const TwoSampleLayout& layout) {
  WeightedCounts out;
  out.rw = layout.q() * static_cast<double>(counts.r1_within) +
           layout.p() * static_cast<double>(counts.r2_within);
  out.rw_tilde = layout.q_tilde() * static_cast<double>(counts.r1_within) +
                 layout.p_tilde() * static_cast<double>(counts.r2_within);
  return out;
}

double generalized_statistic(const EdgeCounts& counts, const PermutationMoments& mom) {
  double det = mom.var_r1 * mom.var_r2 - mom.cov_r1_r2 * mom.cov_r1_r2;
  if (mom.var_r1 <= 0.0 || mom.var_r2 <= 0.0 || det <= 1e-12 * mom.var_r1 * mom.var_r2) {
    fail(errc::singular_covariance,
         "singular covariance (flat graph): (R1, R2) is degenerate, the generalized "
         "statistic is undefined");
  }
  double d1 = static_cast<double>(counts.r1_within) - mom.e_r1;
  double d2 = static_cast<double>(counts.r2_within) - mom.e_r2;
  return (d1 * d1 * mom.var_r2 - 2.0 * d1 * d2 * mom.cov_r1_r2 + d2 * d2 * mom.var_r1) / det;
}

MaxTypeParts zw_zdiff(const EdgeCounts& counts, const PermutationMoments& mom) {
  double var_diff = mom.var_r1 + mom.var_r2 - 2.0 * mom.cov_r1_r2;
  if (mom.var_rw <= 0.0 || var_diff <= 0.0) {
    fail(errc::zero_variance, "zero variance: standardized statistics are undefined");
  }
  double nn = static_cast<double>(mom.m + mom.n);
  double p = static_cast<double>(mom.m) / nn;
  double q = static_cast<double>(mom.n) / nn;
  double r1 = static_cast<double>(counts.r1_within);
  double r2 = static_cast<double>(counts.r2_within);
  MaxTypeParts out;
  out.z_w = (q * r1 + p * r2 - mom.e_rw) / std::sqrt(mom.var_rw);
  out.z_diff = ((r1 - r2) - (mom.e_r1 - mom.e_r2)) / std::sqrt(var_diff);
  out.m_stat = std::max(out.z_w, std::fabs(out.z_diff));
  return out;
}

const char* statistic_name(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::edge: return "edge";
    case StatisticKind::weighted: return "weighted";
    case StatisticKind::weighted_tilde: return "weighted_tilde";
    case StatisticKind::generalized: return "generalized";
    case StatisticKind::maxtype: return "maxtype";
  }
  return "unknown";
}

StatisticKind statistic_from_name(const std::string& name) {
  for (StatisticKind kind : all_statistics()) {
    if (name == statistic_name(kind)) return kind;
  }
  fail(errc::invalid_argument, "unknown statistic '" + name + "'");
}

std::vector<StatisticKind> all_statistics() {
  return {StatisticKind::edge, StatisticKind::weighted, StatisticKind::weighted_tilde,
          StatisticKind::generalized, StatisticKind::maxtype};
}

bool statistic_rejects_small(StatisticKind kind) { return kind == StatisticKind::edge; }

double statistic_value(StatisticKind kind, const EdgeCounts& counts,
                       const PermutationMoments& mom, const TwoSampleLayout& layout) {
  switch (kind) {
    case StatisticKind::edge:
      return static_cast<double>(counts.r_between);
    case StatisticKind::weighted:
      return weighted_statistics(counts, layout).rw;
    case StatisticKind::weighted_tilde:
      return weighted_statistics(counts, layout).rw_tilde;
    case StatisticKind::generalized:
      return generalized_statistic(counts, mom);
    case StatisticKind::maxtype:
      return zw_zdiff(counts, mom).m_stat;
  }
  fail(errc::invalid_argument, "unknown statistic kind");
}

}  // namespace graphtest
