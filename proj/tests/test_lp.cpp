#include <gtest/gtest.h>

#include <functional>

#include "entropy_games/lp.hpp"
#include "test_support.hpp"

namespace entropy_games {
namespace {

using testing::example_3x3;
using testing::mat;
using testing::matching_pennies;
using testing::q;

TEST(SolveLp, SmallTextbookProblem) {
  // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6).
  LinearProgram lp;
  lp.num_vars = 2;
  lp.objective = {3, 5};
  lp.rows = {{{1, 0}, Sense::le, 4}, {{0, 2}, Sense::le, 12}, {{3, 2}, Sense::le, 18}};
  auto r = solve_lp(lp);
  ASSERT_EQ(r.status, LpStatus::feasible);
  EXPECT_EQ(r.optimum, 36);
  EXPECT_EQ(r.x[0], 2);
  EXPECT_EQ(r.x[1], 6);
}

TEST(SolveLp, InfeasibleAndUnbounded) {
  LinearProgram lp;
  lp.num_vars = 1;
  lp.objective = {1};
  lp.rows = {{{1}, Sense::ge, 2}, {{1}, Sense::le, 1}};
  EXPECT_EQ(solve_lp(lp).status, LpStatus::infeasible);
  lp.rows = {{{1}, Sense::ge, 2}};
  EXPECT_EQ(solve_lp(lp).status, LpStatus::unbounded);
}

TEST(SolveLp, NegativeRhsAndRedundantEqualities) {
  LinearProgram lp;
  lp.num_vars = 2;
  lp.objective = {-1, -1};
  lp.rows = {{{-1, -1}, Sense::le, -3}, {{1, 1}, Sense::eq, 3}, {{2, 2}, Sense::eq, 6}};
  auto r = solve_lp(lp);
  ASSERT_EQ(r.status, LpStatus::feasible);
  EXPECT_EQ(r.optimum, -3);
}

TEST(GameValue, Examples) {
  auto u = game_value(example_3x3());
  EXPECT_EQ(u.optimum, frac(7, 9));
  EXPECT_EQ(*u.argmax, ProbVector({q("1/9"), q("4/9"), q("4/9")}));

  auto mp = game_value(matching_pennies());
  EXPECT_EQ(mp.optimum, frac(1, 2));
  EXPECT_EQ(*mp.argmax, ProbVector({q("1/2"), q("1/2")}));

  auto dom = game_value(mat({{"2", "2"}, {"0", "1"}}));
  EXPECT_EQ(dom.optimum, 2);
  EXPECT_EQ(*dom.argmax, ProbVector({q("1"), q("0")}));
}

TEST(IncentiveValue, Examples) {
  auto mp = matching_pennies();
  EXPECT_EQ(incentive_value(mp, {0, 0}), frac(1, 2));
  EXPECT_EQ(incentive_value(mp, {1, 1}), frac(3, 2));
  EXPECT_EQ(incentive_value(mp, {1, 0}), 1);
  EXPECT_THROW(incentive_value(mp, {1}), DimensionError);
}

TEST(MaxLinear, Examples) {
  auto mp = matching_pennies();
  auto a = max_linear_over_polytope(mp, q("1/2"), {1, 0});
  ASSERT_EQ(a.status, LpStatus::feasible);
  EXPECT_EQ(a.optimum, frac(1, 2));
  EXPECT_EQ(*a.argmax, ProbVector({q("1/2"), q("1/2")}));

  auto b = max_linear_over_polytope(mp, q("1/4"), {1, 0});
  ASSERT_EQ(b.status, LpStatus::feasible);
  EXPECT_EQ(b.optimum, frac(3, 4));
  EXPECT_EQ(*b.argmax, ProbVector({q("3/4"), q("1/4")}));

  EXPECT_EQ(max_linear_over_polytope(mp, q("0.6"), {1, 0}).status, LpStatus::infeasible);
  EXPECT_EQ(max_linear_over_polytope(example_3x3(), q("7/9") + frac(1, 1000000), {0, 1, 0}).status,
            LpStatus::infeasible);
}

// Every rational grid point of the simplex with the given denominator.
void simplex_grid(std::size_t n, unsigned den, RationalVector& cur, unsigned left,
                  const std::function<void(const RationalVector&)>& f) {
  if (cur.size() + 1 == n) {
    cur.emplace_back(static_cast<long>(left), static_cast<long>(den));
    cur.back().canonicalize();
    f(cur);
    cur.pop_back();
    return;
  }
  for (unsigned k = 0; k <= left; ++k) {
    cur.emplace_back(static_cast<long>(k), static_cast<long>(den));
    cur.back().canonicalize();
    simplex_grid(n, den, cur, left - k, f);
    cur.pop_back();
  }
}

TEST(Properties, DualityCap) {
  CounterRng rng(3, "lp-duality");
  for (int trial = 0; trial < 60; ++trial) {
    auto g = testing::random_game(rng, 1 + rng.below(5), 1 + rng.below(5));
    const std::size_t n = g.rows();
    Rational wstar = game_value(g).optimum;
    Rational w = g.v() + (wstar - g.v()) * static_cast<long>(rng.below(5)) / 4;
    RationalVector a(n);
    for (auto& x : a) x = frac(static_cast<long>(rng.below(21)) - 10, 1 + static_cast<long>(rng.below(4)));
    auto sol = max_linear_over_polytope(g, w, a);
    ASSERT_EQ(sol.status, LpStatus::feasible);
    EXPECT_LE(sol.optimum, incentive_value(g, a) - w);
    EXPECT_TRUE(in_polytope(g, w, *sol.argmax));
    // At w = v the constraint is slack for a pure maximin row, so the cap is
    // attained in the direction of that row.
    auto at_v = max_linear_over_polytope(g, g.v(), unit_vector(n, g.v_row()));
    EXPECT_EQ(at_v.optimum, 1);
  }
}

TEST(Properties, ConjugacyOnGrid) {
  CounterRng rng(5, "lp-conjugacy");
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(2);
    auto g = testing::random_game(rng, n, n);
    RationalVector a(n);
    for (auto& x : a) x = frac(static_cast<long>(rng.below(9)) - 4, 2);
    Rational best;
    bool first = true;
    RationalVector cur;
    simplex_grid(n, 24, cur, 24, [&](const RationalVector& p) {
      Rational val = security_level(g, ProbVector(p));
      for (std::size_t i = 0; i < n; ++i) val += a[i] * p[i];
      if (first || val > best) best = val;
      first = false;
    });
    Rational L = incentive_value(g, a);
    EXPECT_LE(best, L);
    EXPECT_LE(L.get_d() - best.get_d(), 10.0 / 24);  // grid resolution
    // The LP argmax itself attains L.
    auto sol = game_value(shift_rows(g, a));
    Rational at = security_level(g, *sol.argmax);
    for (std::size_t i = 0; i < n; ++i) at += a[i] * (*sol.argmax)[i];
    EXPECT_EQ(at, L);
  }
}

TEST(Properties, ShiftIdentityAndDirectSum) {
  CounterRng rng(9, "lp-shift");
  for (int trial = 0; trial < 40; ++trial) {
    auto g = testing::random_game(rng, 1 + rng.below(4), 1 + rng.below(4));
    RationalVector a(g.rows());
    for (auto& x : a) x = frac(static_cast<long>(rng.below(11)) - 5, 3);
    Rational c = frac(static_cast<long>(rng.below(7)) - 3, 2);
    RationalVector ac = a;
    for (auto& x : ac) x += c;
    EXPECT_EQ(incentive_value(g, ac), incentive_value(g, a) + c);

    auto h = testing::random_game(rng, 1 + rng.below(3), 1 + rng.below(3));
    EXPECT_EQ(game_value(direct_sum(g, h)).optimum, game_value(g).optimum + game_value(h).optimum);
  }
}

}  // namespace
}  // namespace entropy_games
