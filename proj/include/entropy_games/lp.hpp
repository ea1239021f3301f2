#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "entropy_games/game.hpp"
#include "entropy_games/rational.hpp"

namespace entropy_games {

enum class LpStatus { feasible, infeasible, unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::feasible: return "feasible";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "?";
}

enum class Sense { le, eq, ge };

/// maximize c.x subject to rows (a.x sense b) and x >= 0.
struct LinearProgram {
  struct Row {
    RationalVector coef;
    Sense sense;
    Rational rhs;
  };
  std::size_t num_vars = 0;
  RationalVector objective;
  std::vector<Row> rows;
};

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Rational optimum;
  RationalVector x;
};

namespace detail {

// Dense two-phase tableau simplex over exact rationals with Bland's rule.
class Tableau {
 public:
  Tableau(std::vector<RationalVector> t, std::vector<std::size_t> basis)
      : t_(std::move(t)), basis_(std::move(basis)) {}

  std::size_t width() const { return t_.empty() ? 0 : t_[0].size() - 1; }

  // Runs to optimality for costs c. Columns >= limit never enter.
  LpStatus optimize(const RationalVector& c, std::size_t limit) {
    reduced_ = c;
    reduced_.push_back(Rational(0));
    for (std::size_t i = 0; i < t_.size(); ++i) {
      const Rational& cb = c[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j <= width(); ++j) reduced_[j] -= cb * t_[i][j];
    }
    while (true) {
      std::size_t enter = limit;
      for (std::size_t j = 0; j < limit; ++j)
        if (reduced_[j] > 0) {
          enter = j;
          break;
        }
      if (enter == limit) return LpStatus::feasible;
      std::optional<std::size_t> leave;
      Rational best_ratio;
      for (std::size_t i = 0; i < t_.size(); ++i) {
        if (t_[i][enter] <= 0) continue;
        Rational ratio = t_[i].back() / t_[i][enter];
        if (!leave || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[*leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (!leave) return LpStatus::unbounded;
      pivot(*leave, enter);
    }
  }

  void pivot(std::size_t r, std::size_t e) {
    const Rational inv = 1 / t_[r][e];
    for (auto& x : t_[r]) x *= inv;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (i == r || t_[i][e] == 0) continue;
      const Rational f = t_[i][e];
      for (std::size_t j = 0; j <= width(); ++j)
        if (t_[r][j] != 0) t_[i][j] -= f * t_[r][j];
    }
    if (!reduced_.empty() && reduced_[e] != 0) {
      const Rational f = reduced_[e];
      for (std::size_t j = 0; j <= width(); ++j)
        if (t_[r][j] != 0) reduced_[j] -= f * t_[r][j];
    }
    basis_[r] = e;
  }

  // Objective value = -reduced rhs entry.
  Rational value() const { return -reduced_.back(); }

  std::vector<RationalVector>& rows() { return t_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void drop_row(std::size_t i) {
    t_.erase(t_.begin() + static_cast<long>(i));
    basis_.erase(basis_.begin() + static_cast<long>(i));
  }

  void truncate_columns(std::size_t keep) {
    for (auto& row : t_) {
      Rational rhs = row.back();
      row.resize(keep);
      row.push_back(rhs);
    }
  }

 private:
  std::vector<RationalVector> t_;
  std::vector<std::size_t> basis_;
  RationalVector reduced_;
};

}  // namespace detail

/// Exact two-phase simplex. Returns the first optimal basic solution reached
/// under Bland's rule.
inline LpResult solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars;
  const std::size_t m = lp.rows.size();
  if (lp.objective.size() != n) throw DimensionError("objective length does not match variable count");
  std::size_t slack_count = 0, art_count = 0;
  for (const auto& row : lp.rows) {
    if (row.coef.size() != n) throw DimensionError("constraint length does not match variable count");
    bool flip = row.rhs < 0;
    Sense s = row.sense;
    if (flip && s != Sense::eq) s = (s == Sense::le) ? Sense::ge : Sense::le;
    if (s != Sense::eq) ++slack_count;
    if (s != Sense::le) ++art_count;
  }
  const std::size_t art_begin = n + slack_count;
  const std::size_t width = art_begin + art_count;
  std::vector<RationalVector> t(m, RationalVector(width + 1));
  std::vector<std::size_t> basis(m);
  std::size_t next_slack = n, next_art = art_begin;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    const bool flip = row.rhs < 0;
    Sense s = row.sense;
    if (flip && s != Sense::eq) s = (s == Sense::le) ? Sense::ge : Sense::le;
    for (std::size_t j = 0; j < n; ++j) t[i][j] = flip ? Rational(-row.coef[j]) : row.coef[j];
    t[i][width] = flip ? Rational(-row.rhs) : row.rhs;
    if (s == Sense::le) {
      t[i][next_slack] = 1;
      basis[i] = next_slack++;
    } else {
      if (s == Sense::ge) t[i][next_slack++] = -1;
      t[i][next_art] = 1;
      basis[i] = next_art++;
    }
  }
  detail::Tableau tab(std::move(t), std::move(basis));
  LpResult out;
  if (art_count > 0) {
    RationalVector phase1(width, Rational(0));
    for (std::size_t j = art_begin; j < width; ++j) phase1[j] = -1;
    tab.optimize(phase1, width);
    if (tab.value() != 0) return out;  // infeasible
    // Drive remaining artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < tab.rows().size();) {
      if (tab.basis()[i] < art_begin) {
        ++i;
        continue;
      }
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < art_begin; ++j)
        if (tab.rows()[i][j] != 0) {
          col = j;
          break;
        }
      if (col) {
        tab.pivot(i, *col);
        ++i;
      } else {
        tab.drop_row(i);
      }
    }
    tab.truncate_columns(art_begin);
  }
  RationalVector c(art_begin, Rational(0));
  for (std::size_t j = 0; j < n; ++j) c[j] = lp.objective[j];
  out.status = tab.optimize(c, art_begin);
  if (out.status != LpStatus::feasible) return out;
  out.optimum = tab.value();
  out.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < tab.rows().size(); ++i)
    if (tab.basis()[i] < n) out.x[tab.basis()[i]] = tab.rows()[i].back();
  return out;
}

struct LpSolution {
  Rational optimum;
  std::optional<ProbVector> argmax;
  LpStatus status = LpStatus::infeasible;
};

/// w* = Val(U) and a maximin strategy.
inline LpSolution game_value(const PayoffMatrix& g) {
  const std::size_t n = g.rows();
  LinearProgram lp;
  lp.num_vars = n + 2;  // p, w+, w-
  lp.objective.assign(n + 2, Rational(0));
  lp.objective[n] = 1;
  lp.objective[n + 1] = -1;
  RationalVector sum(n + 2, Rational(0));
  for (std::size_t i = 0; i < n; ++i) sum[i] = 1;
  lp.rows.push_back({sum, Sense::eq, Rational(1)});
  for (std::size_t j = 0; j < g.cols(); ++j) {
    RationalVector a(n + 2);
    for (std::size_t i = 0; i < n; ++i) a[i] = g.at(i, j);
    a[n] = -1;
    a[n + 1] = 1;
    lp.rows.push_back({std::move(a), Sense::ge, Rational(0)});
  }
  LpResult r = solve_lp(lp);
  if (r.status != LpStatus::feasible) throw InvariantViolation("game value LP did not reach an optimum");
  r.x.resize(n);
  return {r.optimum, ProbVector(std::move(r.x)), LpStatus::feasible};
}

/// Val(U + a 1^T).
inline Rational incentive_value(const PayoffMatrix& g, const RationalVector& a) {
  return game_value(shift_rows(g, a)).optimum;
}

/// max a.p over P_U(w). Infeasible exactly when w > w*.
inline LpSolution max_linear_over_polytope(const PayoffMatrix& g, const Rational& w, const RationalVector& a) {
  const std::size_t n = g.rows();
  if (a.size() != n) throw DimensionError("objective length does not match row count");
  LinearProgram lp;
  lp.num_vars = n;
  lp.objective = a;
  lp.rows.push_back({RationalVector(n, Rational(1)), Sense::eq, Rational(1)});
  for (std::size_t j = 0; j < g.cols(); ++j) {
    RationalVector col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = g.at(i, j);
    lp.rows.push_back({std::move(col), Sense::ge, w});
  }
  LpResult r = solve_lp(lp);
  LpSolution out;
  out.status = r.status;
  if (r.status == LpStatus::feasible) {
    out.optimum = r.optimum;
    out.argmax = ProbVector(std::move(r.x));
  }
  return out;
}

inline RationalVector unit_vector(std::size_t n, std::size_t i) {
  RationalVector e(n, Rational(0));
  e.at(i) = 1;
  return e;
}

}  // namespace entropy_games
