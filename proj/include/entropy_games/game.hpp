#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "entropy_games/errors.hpp"
#include "entropy_games/rational.hpp"

namespace entropy_games {

/// A pmf over {0, ..., k-1}. Exact mode (Rational) requires the entries to
/// sum to exactly one; float mode (double) tolerates 1e-12.
template <class T>
class BasicProbVector {
 public:
  using value_type = T;

  BasicProbVector() = default;
  explicit BasicProbVector(std::vector<T> probs) : probs_(std::move(probs)) {
    if constexpr (!std::is_floating_point_v<T>)
      for (auto& x : probs_) x.canonicalize();
    validate();
  }

  static BasicProbVector point_mass(std::size_t k, std::size_t i) {
    std::vector<T> p(k, T(0));
    p.at(i) = T(1);
    return BasicProbVector(std::move(p));
  }

  static BasicProbVector uniform(std::size_t k) {
    if (k == 0) throw ValidationError("empty pmf");
    return BasicProbVector(std::vector<T>(k, T(1) / T(static_cast<long>(k))));
  }

  std::size_t size() const { return probs_.size(); }
  const T& operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<T>& probs() const { return probs_; }
  auto begin() const { return probs_.begin(); }
  auto end() const { return probs_.end(); }

  friend bool operator==(const BasicProbVector& a, const BasicProbVector& b) { return a.probs_ == b.probs_; }

 private:
  void validate() const {
    if (probs_.empty()) throw ValidationError("empty pmf");
    T total(0);
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(probs_[i])) throw ValidationError("pmf entry " + std::to_string(i) + " is not finite");
      }
      if (probs_[i] < T(0)) throw ValidationError("pmf entry " + std::to_string(i) + " is negative");
      total += probs_[i];
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (std::abs(total - 1.0) > 1e-12) throw ValidationError("pmf does not sum to 1");
    } else {
      if (total != T(1)) throw ValidationError("pmf does not sum to exactly 1 (sum " + to_string(total) + ")");
    }
  }

  std::vector<T> probs_;
};

using ProbVector = BasicProbVector<Rational>;
using ProbVectorF = BasicProbVector<double>;

inline ProbVectorF to_float(const ProbVector& p) { return ProbVectorF(to_doubles(p.probs())); }

/// n x n' payoff table for the row player with cached m_lo, m_hi, v.
class PayoffMatrix {
 public:
  PayoffMatrix() = default;

  // Throws ValidationError naming the offending row or cell.
  explicit PayoffMatrix(std::vector<RationalVector> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) throw ValidationError("payoff matrix is empty");
    cols_ = rows_[0].size();
    if (cols_ == 0) throw ValidationError("row 1 is empty");
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (rows_[i].size() != cols_)
        throw ValidationError("ragged matrix: row " + std::to_string(i + 1) + " has " +
                              std::to_string(rows_[i].size()) + " entries, expected " + std::to_string(cols_));
    m_lo_ = m_hi_ = rows_[0][0];
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      Rational row_min = rows_[i][0];
      for (const auto& u : rows_[i]) {
        m_lo_ = std::min(m_lo_, u);
        m_hi_ = std::max(m_hi_, u);
        row_min = std::min(row_min, u);
      }
      if (i == 0 || row_min > v_) {
        v_ = row_min;
        v_row_ = i;
      }
    }
    max_abs_ = std::max(abs(m_lo_), abs(m_hi_));
  }

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }
  const Rational& at(std::size_t i, std::size_t j) const { return rows_[i][j]; }
  const RationalVector& row(std::size_t i) const { return rows_[i]; }
  const std::vector<RationalVector>& entries() const { return rows_; }

  const Rational& m_lo() const { return m_lo_; }
  const Rational& m_hi() const { return m_hi_; }
  // Pure-strategy security level max_i min_j u_ij.
  const Rational& v() const { return v_; }
  // Lowest row index attaining v.
  std::size_t v_row() const { return v_row_; }
  // M = max |u_ij|.
  const Rational& max_abs() const { return max_abs_; }

  friend bool operator==(const PayoffMatrix& a, const PayoffMatrix& b) { return a.rows_ == b.rows_; }

 private:
  std::vector<RationalVector> rows_;
  std::size_t cols_ = 0;
  Rational m_lo_, m_hi_, v_, max_abs_;
  std::size_t v_row_ = 0;
};

// Builds a matrix from textual cells ("1", "0.5", "2/3").
inline PayoffMatrix validate_game(const std::vector<std::vector<std::string>>& raw) {
  if (raw.empty()) throw ValidationError("payoff matrix is empty");
  std::vector<RationalVector> rows;
  rows.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    RationalVector row;
    for (std::size_t j = 0; j < raw[i].size(); ++j) {
      try {
        row.push_back(parse_rational(raw[i][j]));
      } catch (const ValidationError& e) {
        throw ValidationError("cell (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "): " + e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  return PayoffMatrix(std::move(rows));
}

// Builds a matrix from doubles; each value is converted exactly.
inline PayoffMatrix validate_game(const std::vector<std::vector<double>>& raw) {
  if (raw.empty()) throw ValidationError("payoff matrix is empty");
  std::vector<RationalVector> rows;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    RationalVector row;
    for (std::size_t j = 0; j < raw[i].size(); ++j) {
      if (!std::isfinite(raw[i][j]))
        throw ValidationError("cell (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is not finite");
      row.emplace_back(raw[i][j]);
    }
    rows.push_back(std::move(row));
  }
  return PayoffMatrix(std::move(rows));
}

namespace detail {
template <class T>
void check_length(const PayoffMatrix& g, const BasicProbVector<T>& p) {
  if (p.size() != g.rows())
    throw DimensionError("strategy has " + std::to_string(p.size()) + " entries but the game has " +
                         std::to_string(g.rows()) + " rows");
}
}  // namespace detail

/// Expected payoff of column j under p.
inline Rational column_payoff(const PayoffMatrix& g, const ProbVector& p, std::size_t j) {
  detail::check_length(g, p);
  Rational s(0);
  for (std::size_t i = 0; i < g.rows(); ++i) s += p[i] * g.at(i, j);
  return s;
}

/// K(p) = min_j sum_i p_i u_ij.
inline Rational security_level(const PayoffMatrix& g, const ProbVector& p) {
  Rational best = column_payoff(g, p, 0);
  for (std::size_t j = 1; j < g.cols(); ++j) best = std::min(best, column_payoff(g, p, j));
  return best;
}

inline double security_level(const PayoffMatrix& g, const ProbVectorF& p) {
  detail::check_length(g, p);
  double best = kInf;
  for (std::size_t j = 0; j < g.cols(); ++j) {
    double s = 0;
    for (std::size_t i = 0; i < g.rows(); ++i) s += p[i] * g.at(i, j).get_d();
    best = std::min(best, s);
  }
  return best;
}

/// p in P_U(w), compared exactly.
inline bool in_polytope(const PayoffMatrix& g, const Rational& w, const ProbVector& p) {
  return security_level(g, p) >= w;
}

/// Rows (i1, i2) and columns (j1, j2) in row-major order, second index fastest.
inline PayoffMatrix direct_sum(const PayoffMatrix& a, const PayoffMatrix& b) {
  std::vector<RationalVector> rows;
  rows.reserve(a.rows() * b.rows());
  for (std::size_t i1 = 0; i1 < a.rows(); ++i1)
    for (std::size_t i2 = 0; i2 < b.rows(); ++i2) {
      RationalVector row;
      row.reserve(a.cols() * b.cols());
      for (std::size_t j1 = 0; j1 < a.cols(); ++j1)
        for (std::size_t j2 = 0; j2 < b.cols(); ++j2) row.push_back(a.at(i1, j1) + b.at(i2, j2));
      rows.push_back(std::move(row));
    }
  return PayoffMatrix(std::move(rows));
}

// Adds a_i to every entry of row i.
inline PayoffMatrix shift_rows(const PayoffMatrix& g, const RationalVector& a) {
  if (a.size() != g.rows()) throw DimensionError("incentive vector length does not match row count");
  auto rows = g.entries();
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (auto& u : rows[i]) u += a[i];
  return PayoffMatrix(std::move(rows));
}

}  // namespace entropy_games
