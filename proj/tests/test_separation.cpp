#include <gtest/gtest.h>

#include <cmath>

#include "entropy_games/separation.hpp"
#include "test_support.hpp"

namespace entropy_games {
namespace {

using testing::example_3x3;
using testing::matching_pennies;
using testing::q;

TEST(D1Bound, Examples) {
  EXPECT_EQ(d1_separation_bound(matching_pennies(), q("0.5"), q("0.25")), frac(1, 4));
  EXPECT_EQ(d1_separation_bound(matching_pennies(), q("0.3"), q("0.3")), 0);
  EXPECT_EQ(d1_separation_bound(example_3x3(), q("7/9"), q("1/2")), frac(5, 36));
  EXPECT_THROW(d1_separation_bound(matching_pennies(), q("0.25"), q("0.5")), DomainError);
  EXPECT_THROW(d1_separation_bound(matching_pennies(), q("0.6"), q("0.5")), DomainError);
}

TEST(D2Bound, Examples) {
  EXPECT_NEAR(d2_separation_bound(matching_pennies(), q("0.5"), q("0.25")).value, std::log2(1.25), 1e-15);
  EXPECT_EQ(d2_separation_bound(matching_pennies(), q("0.4"), q("0.4")).value, 0.0);
  EXPECT_NEAR(d2_separation_bound(example_3x3(), q("0.75"), q("0.5")).value, std::log2(8.0 / 7.0), 1e-15);
  // w* = m_hi forces a pure row at m_hi, hence w1 = w2 = v.
  auto col = testing::mat({{"0", "1"}, {"1", "1"}});
  EXPECT_EQ(d2_separation_bound(col, q("1"), q("1")).value, 0.0);
}

TEST(D2Bound, MatchesG2AtV) {
  CounterRng rng(31, "d2-g2");
  for (int trial = 0; trial < 200; ++trial) {
    auto g = testing::random_game(rng, 1 + rng.below(4), 1 + rng.below(4));
    Rational wstar = game_value(g).optimum;
    Rational w = g.v() + (wstar - g.v()) * static_cast<long>(rng.below(9)) / 8;
    if (w == g.m_hi()) continue;
    EXPECT_EQ(d2_separation_bound(g, w, g.v()).value, bounds_closed_form(g, w).G2);
  }
}

TEST(ChapmanRobbins, Examples) {
  auto eq = chapman_robbins({0.5, 0.5}, {0.25, 0.75}, {1.0, -1.0 / 3});
  EXPECT_NEAR(eq.chi2, 1.0 / 3, 1e-15);
  EXPECT_NEAR(eq.ratio, 1.0 / 3, 1e-15);
  EXPECT_NEAR(eq.gap, 0.0, 1e-15);

  auto same = chapman_robbins({0.3, 0.7}, {0.3, 0.7}, {2.0, -5.0});
  EXPECT_EQ(same.chi2, 0.0);
  EXPECT_EQ(same.ratio, 0.0);

  // W = 1{A = 0}: E_q = 1/4, E_p = 1/2, Var_q = 3/16.
  auto ind = chapman_robbins({0.5, 0.5}, {0.25, 0.75}, {1.0, 0.0});
  EXPECT_NEAR(ind.ratio, 0.0625 / 0.1875, 1e-15);
  EXPECT_LE(ind.ratio, ind.chi2 + 1e-15);

  auto flat = chapman_robbins({0.5, 0.5}, {1.0, 0.0}, {1.0, 0.0});
  EXPECT_TRUE(flat.support_violation);
}

TEST(VarianceRatio, Examples) {
  EXPECT_NEAR(variance_ratio_bound(q("0.5"), q("0.25"), q("0"), q("1")).value, 0.25, 1e-15);
  EXPECT_EQ(variance_ratio_bound(q("0.5"), q("0.5"), q("0"), q("1")).value, 0.0);
  EXPECT_TRUE(std::isinf(variance_ratio_bound(q("1"), q("0.5"), q("0"), q("1")).value));
  EXPECT_DOUBLE_EQ(variance_ratio_g(0.5, 0.25, 0, 1), 0.25);
}

TEST(VarianceRatio, BinaryExtremalAttainsBound) {
  CounterRng rng(32, "extremal");
  for (int trial = 0; trial < 100; ++trial) {
    Rational lo = frac(-static_cast<long>(rng.below(5))), hi = lo + 1 + static_cast<long>(rng.below(5));
    Rational w1 = lo + (hi - lo) * frac(1 + static_cast<long>(rng.below(9)), 10);
    Rational w2 = lo + (w1 - lo) * frac(static_cast<long>(rng.below(10)), 10);
    // W* in {lo, hi} with mean w1.
    Rational p_hi = (w1 - lo) / (hi - lo);
    Rational var = p_hi * (hi - w1) * (hi - w1) + (1 - p_hi) * (w1 - lo) * (w1 - lo);
    Rational ratio = (w1 - w2) * (w1 - w2) / var;
    EXPECT_NEAR(variance_ratio_bound(w1, w2, lo, hi).value, ratio.get_d(), 1e-14);
  }
}

TEST(Properties, GNondecreasingAboveW2) {
  CounterRng rng(33, "g-monotone");
  for (int trial = 0; trial < 200; ++trial) {
    double lo = -5 * rng.uniform(), hi = lo + 0.5 + 5 * rng.uniform();
    double w2 = lo + (hi - lo) * 0.9 * rng.uniform();
    double prev = variance_ratio_g(w2, w2, lo, hi);
    for (int k = 1; k < 100; ++k) {
      double mu = w2 + (hi - w2) * k / 100.0;
      double cur = variance_ratio_g(mu, w2, lo, hi);
      EXPECT_GE(cur, prev - 1e-12);
      prev = cur;
    }
  }
}

TEST(Properties, ChapmanRobbinsGap) {
  CounterRng rng(34, "cr-gap");
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 2 + rng.below(5);
    auto p = testing::random_pmf(rng, n), qv = testing::random_pmf(rng, n);
    std::vector<double> x(n);
    for (auto& v : x) v = 10 * rng.uniform() - 5;
    EXPECT_GE(chapman_robbins(p, qv, x).gap, -1e-10);
    for (std::size_t i = 0; i < n; ++i) x[i] = (p[i] - qv[i]) / qv[i];
    EXPECT_LE(std::abs(chapman_robbins(p, qv, x).gap), 1e-10);
  }
}

TEST(SampleCheck, Examples) {
  auto mp = sample_check_separation(matching_pennies(), q("0.5"), q("0.25"), 1000, 7);
  EXPECT_EQ(mp.violations, 0u);
  EXPECT_EQ(mp.n_samples, 1000u);
  EXPECT_FALSE(mp.partial);
  EXPECT_GE(mp.min_observed_d1, mp.bound_d1 - kSeparationTolD1);

  auto eq = sample_check_separation(matching_pennies(), q("0.3"), q("0.3"), 100, 1);
  EXPECT_EQ(eq.bound_d1, 0.0);
  EXPECT_EQ(eq.bound_d2, 0.0);
  EXPECT_EQ(eq.violations, 0u);

  auto u = sample_check_separation(example_3x3(), q("0.75"), q("0.6"), 1000, 7);
  EXPECT_EQ(u.violations, 0u);
  EXPECT_GE(u.min_observed_d2, u.bound_d2 - kSeparationTolD2);
  EXPECT_GT(u.vertex_pairs, 0u);
}

TEST(Properties, RandomGamesNeverViolate) {
  CounterRng rng(35, "sep-random");
  for (int trial = 0; trial < 40; ++trial) {
    auto g = testing::random_game(rng, 2 + rng.below(3), 1 + rng.below(4));
    Rational wstar = game_value(g).optimum;
    Rational w1 = g.v() + (wstar - g.v()) * static_cast<long>(1 + rng.below(4)) / 4;
    Rational w2 = g.v() + (w1 - g.v()) * static_cast<long>(rng.below(4)) / 4;
    auto r = sample_check_separation(g, w1, w2, 200, trial);
    EXPECT_EQ(r.violations, 0u) << r.diagnostic;
  }
}

}  // namespace
}  // namespace entropy_games
