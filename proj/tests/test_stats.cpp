#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "graphtest/graph.hpp"
#include "graphtest/stats.hpp"

using namespace graphtest;

namespace {

template <class Fn>
errc error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a graphtest::Error");
  return errc::invalid_argument;
}

SimilarityGraph path4() { return validate_graph(4, {{0, 1}, {1, 2}, {2, 3}}); }

TwoSampleLayout layout1122() { return make_layout({1, 1, 2, 2}); }

}  // namespace

TEST_CASE("layout validation") {
  TwoSampleLayout lay = make_layout({2, 1, 1, 2, 2});
  CHECK(lay.m == 2);
  CHECK(lay.n == 3);
  CHECK(lay.total() == 5);
  CHECK(lay.p() == doctest::Approx(0.4));
  CHECK(lay.q() == doctest::Approx(0.6));
  CHECK(lay.p_tilde() == doctest::Approx(1.0 / 3.0));
  CHECK(lay.q_tilde() == doctest::Approx(2.0 / 3.0));

  CHECK(error_code_of([] { make_layout({1, 1, 2, 3}); }) == errc::invalid_argument);
  CHECK(error_code_of([] { make_layout({1, 2, 2, 2}); }) == errc::too_few_nodes);
  CHECK(error_code_of([] { make_layout({1, 1, 1, 1}); }) == errc::too_few_nodes);
}

TEST_CASE("edge counts split by label") {
  EdgeCounts c = count_edges(path4(), layout1122());
  CHECK(c.r_between == 1);
  CHECK(c.r1_within == 1);
  CHECK(c.r2_within == 1);

  EdgeCounts alt = count_edges(path4(), make_layout({1, 2, 1, 2}));
  CHECK(alt.r_between == 3);
  CHECK(alt.r1_within == 0);
  CHECK(alt.r2_within == 0);

  CHECK(error_code_of([] { count_edges(path4(), make_layout({1, 1, 2, 2, 2})); }) ==
        errc::length_mismatch);
}

// Hand-enumerated null on the 4-path with m = n = 2: the 6 labelings give
// R in {1,1,2,2,3,3}? No: cells (r1,r2) are (1,1)x2, (0,0)x2, (0,1), (1,0),
// so E(R) = 2, Var(R) = 2/3, E(R1) = 1/2, Var(R1) = 1/4, Cov = 1/12.
TEST_CASE("permutation moments on the 4-path") {
  DegreeStats gs = degree_stats(path4());
  PermutationMoments mom = permutation_moments(gs, layout1122());
  CHECK(mom.m == 2);
  CHECK(mom.n == 2);
  CHECK(mom.e_r == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(mom.var_r == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(mom.e_r1 == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mom.e_r2 == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mom.var_r1 == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(mom.var_r2 == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(mom.cov_r1_r2 == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(mom.e_rw == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mom.var_rw == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(mom.e_rwt == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mom.var_rwt == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("linear combination variance ties all the second moments together") {
  SimilarityGraph p5 = validate_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  DegreeStats gs = degree_stats(p5);
  TwoSampleLayout lay = make_layout({1, 1, 2, 2, 2});
  PermutationMoments mom = permutation_moments(gs, lay);

  CHECK(linear_combo_variance(gs, lay, 1.0) == doctest::Approx(mom.var_r1).epsilon(1e-13));
  CHECK(linear_combo_variance(gs, lay, 0.0) == doctest::Approx(mom.var_r2).epsilon(1e-13));
  CHECK(linear_combo_variance(gs, lay, lay.q()) == doctest::Approx(mom.var_rw).epsilon(1e-13));
  double a_min = (lay.n - 1.0) / (lay.total() - 2.0);
  CHECK(linear_combo_variance(gs, lay, a_min) == doctest::Approx(mom.var_rwt).epsilon(1e-13));
  double half = linear_combo_variance(gs, lay, 0.5);
  CHECK(mom.cov_r1_r2 ==
        doctest::Approx(2.0 * half - 0.5 * (mom.var_r1 + mom.var_r2)).epsilon(1e-12));
}

TEST_CASE("weighted statistics on the 4-path") {
  WeightedCounts w = weighted_statistics(count_edges(path4(), layout1122()), layout1122());
  CHECK(w.rw == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w.rw_tilde == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("generalized statistic on the 4-path") {
  TwoSampleLayout lay = layout1122();
  DegreeStats gs = degree_stats(path4());
  PermutationMoments mom = permutation_moments(gs, lay);
  // dev = (1/2, 1/2), Sigma = [[1/4, 1/12], [1/12, 1/4]] -> S = 3/2
  CHECK(generalized_statistic(count_edges(path4(), lay), mom) ==
        doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("generalized statistic refuses flat graphs") {
  SimilarityGraph pm = validate_graph(4, {{0, 1}, {2, 3}});
  TwoSampleLayout lay = layout1122();
  PermutationMoments mom = permutation_moments(degree_stats(pm), lay);
  CHECK(error_code_of([&] { generalized_statistic(count_edges(pm, lay), mom); }) ==
        errc::singular_covariance);
}

TEST_CASE("max-type parts on the 4-path") {
  TwoSampleLayout lay = layout1122();
  PermutationMoments mom = permutation_moments(degree_stats(path4()), lay);
  MaxTypeParts parts = zw_zdiff(count_edges(path4(), lay), mom);
  CHECK(parts.z_w == doctest::Approx(1.224744871391589).epsilon(1e-12));
  CHECK(parts.z_diff == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(parts.m_stat == doctest::Approx(1.224744871391589).epsilon(1e-12));
}

TEST_CASE("statistic_value dispatches every kind") {
  TwoSampleLayout lay = layout1122();
  SimilarityGraph g = path4();
  PermutationMoments mom = permutation_moments(degree_stats(g), lay);
  EdgeCounts c = count_edges(g, lay);
  CHECK(statistic_value(StatisticKind::edge, c, mom, lay) == doctest::Approx(1.0));
  CHECK(statistic_value(StatisticKind::weighted, c, mom, lay) == doctest::Approx(1.0));
  CHECK(statistic_value(StatisticKind::weighted_tilde, c, mom, lay) == doctest::Approx(1.0));
  CHECK(statistic_value(StatisticKind::generalized, c, mom, lay) == doctest::Approx(1.5));
  CHECK(statistic_value(StatisticKind::maxtype, c, mom, lay) ==
        doctest::Approx(1.224744871391589));
}

TEST_CASE("statistic names round trip") {
  for (StatisticKind kind : all_statistics()) {
    CHECK(statistic_from_name(statistic_name(kind)) == kind);
  }
  CHECK(all_statistics().size() == 5);
  CHECK(statistic_rejects_small(StatisticKind::edge));
  CHECK_FALSE(statistic_rejects_small(StatisticKind::weighted));
  CHECK_FALSE(statistic_rejects_small(StatisticKind::generalized));
  CHECK_FALSE(statistic_rejects_small(StatisticKind::maxtype));
  CHECK(error_code_of([] { statistic_from_name("bogus"); }) == errc::invalid_argument);
}

// Phone-network regression: 299 pooled networks, 214 weekday and 85
// weekend, 9-MST has 2682 edges. Expectations depend only on those
// counts, so they are an exact arithmetic pin.
TEST_CASE("published summary table is reproduced") {
  const int m = 214, N = 299;  // 85 weekend networks carry label 2
  std::vector<int> labels(N, 2);
  for (int i = 0; i < m; ++i) labels[i] = 1;
  TwoSampleLayout lay = make_layout(labels);

  // Only |G| is public; the SD columns would need the raw graph.
  DegreeStats gs;
  gs.edge_count = 2682;
  PermutationMoments mom = permutation_moments(gs, lay);
  CHECK(mom.e_r == doctest::Approx(1095.05).epsilon(0.01 / 1095.05));
  CHECK(mom.e_r1 == doctest::Approx(1372.03).epsilon(0.01 / 1372.03));
  CHECK(mom.e_r2 == doctest::Approx(214.92).epsilon(0.01 / 214.92));
  CHECK(mom.e_rw == doctest::Approx(543.86).epsilon(0.01 / 543.86));

  EdgeCounts c{2682 - 1274 - 284, 1274, 284};
  WeightedCounts w = weighted_statistics(c, lay);
  CHECK(w.rw == doctest::Approx(565.44).epsilon(0.01 / 565.44));
}
