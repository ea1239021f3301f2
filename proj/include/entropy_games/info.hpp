#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "entropy_games/errors.hpp"
#include "entropy_games/game.hpp"
#include "entropy_games/rational.hpp"

namespace entropy_games {

/// p(x, y) on a finite |X| x |Y| grid, stored as doubles.
class JointPmf {
 public:
  JointPmf() = default;

  explicit JointPmf(std::vector<std::vector<double>> table) : table_(std::move(table)) {
    if (table_.empty() || table_[0].empty()) throw ValidationError("joint pmf is empty");
    const std::size_t ny = table_[0].size();
    double total = 0;
    for (std::size_t x = 0; x < table_.size(); ++x) {
      if (table_[x].size() != ny)
        throw ValidationError("ragged joint pmf: row " + std::to_string(x + 1) + " has " +
                              std::to_string(table_[x].size()) + " entries, expected " + std::to_string(ny));
      for (std::size_t y = 0; y < ny; ++y) {
        double v = table_[x][y];
        if (!std::isfinite(v) || v < 0)
          throw ValidationError("joint pmf cell (" + std::to_string(x + 1) + "," + std::to_string(y + 1) +
                                ") is negative or not finite");
        total += v;
      }
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("joint pmf does not sum to 1");
    px_.assign(table_.size(), 0.0);
    py_.assign(ny, 0.0);
    for (std::size_t x = 0; x < table_.size(); ++x)
      for (std::size_t y = 0; y < ny; ++y) {
        px_[x] += table_[x][y];
        py_[y] += table_[x][y];
      }
  }

  static JointPmf from_rationals(const std::vector<RationalVector>& table) {
    Rational total(0);
    std::vector<std::vector<double>> t;
    for (const auto& row : table) {
      std::vector<double> r;
      for (const auto& q : row) {
        total += q;
        r.push_back(q.get_d());
      }
      t.push_back(std::move(r));
    }
    if (!table.empty() && total != 1) throw ValidationError("joint pmf does not sum to exactly 1");
    return JointPmf(std::move(t));
  }

  // X with pmf px, Y constant.
  static JointPmf independent_x(const std::vector<double>& px) {
    std::vector<std::vector<double>> t;
    for (double p : px) t.push_back({p});
    return JointPmf(std::move(t));
  }

  // X uniform binary; Y = X with probability alpha, else the erasure symbol 2.
  static JointPmf binary_leak(double alpha) {
    return JointPmf({{alpha / 2, 0.0, (1 - alpha) / 2}, {0.0, alpha / 2, (1 - alpha) / 2}});
  }

  std::size_t nx() const { return table_.size(); }
  std::size_t ny() const { return py_.size(); }
  double operator()(std::size_t x, std::size_t y) const { return table_[x][y]; }
  const std::vector<std::vector<double>>& table() const { return table_; }
  const std::vector<double>& px() const { return px_; }
  const std::vector<double>& py() const { return py_; }

 private:
  std::vector<std::vector<double>> table_;
  std::vector<double> px_, py_;
};

namespace detail {
inline double plogp(double p) { return p > 0 ? -p * std::log2(p) : 0.0; }
}  // namespace detail

/// Shannon entropy in bits, 0 log 0 = 0.
template <class Range>
double entropy(const Range& p) {
  double h = 0;
  for (const auto& x : p) h += detail::plogp(to_double(x));
  return h;
}

inline double joint_entropy(const JointPmf& j) {
  double h = 0;
  for (const auto& row : j.table())
    for (double p : row) h += detail::plogp(p);
  return h;
}

/// H(X|Y) = H(X,Y) - H(Y), accumulated as sum_y p(y) H(X|Y=y).
inline double conditional_entropy(const JointPmf& j) {
  double h = 0;
  for (std::size_t y = 0; y < j.ny(); ++y) {
    const double py = j.py()[y];
    if (py <= 0) continue;
    for (std::size_t x = 0; x < j.nx(); ++x) h += py * detail::plogp(j(x, y) / py);
  }
  return h;
}

/// Renyi entropy of order alpha (alpha = +inf gives min-entropy).
template <class Range>
double renyi_entropy(const Range& p, double alpha) {
  if (!(alpha > 0)) throw DomainError("Renyi order must be positive");
  if (alpha == 1.0) throw DomainError("Renyi order 1 is the Shannon entropy; use entropy()");
  if (std::isinf(alpha)) {
    double m = 0;
    for (const auto& x : p) m = std::max(m, to_double(x));
    return -std::log2(m);
  }
  double s = 0;
  for (const auto& x : p) {
    double v = to_double(x);
    if (v > 0) s += std::pow(v, alpha);
  }
  return std::log2(s) / (1.0 - alpha);
}

template <class RangeA, class RangeB>
double tv_distance(const RangeA& p, const RangeB& q) {
  if (std::size(p) != std::size(q)) throw DimensionError("tv_distance: length mismatch");
  double s = 0;
  auto it = std::begin(q);
  for (const auto& x : p) s += std::abs(to_double(x) - to_double(*it++));
  return s / 2;
}

inline double tv_distance(const JointPmf& p, const JointPmf& q) {
  if (p.nx() != q.nx() || p.ny() != q.ny()) throw DimensionError("tv_distance: shape mismatch");
  double s = 0;
  for (std::size_t x = 0; x < p.nx(); ++x)
    for (std::size_t y = 0; y < p.ny(); ++y) s += std::abs(p(x, y) - q(x, y));
  return s / 2;
}

/// d2(p, q) = log2 sum p_i^2 / q_i; +inf when p_i > 0 = q_i.
template <class RangeA, class RangeB>
double d2_divergence(const RangeA& p, const RangeB& q) {
  if (std::size(p) != std::size(q)) throw DimensionError("d2_divergence: length mismatch");
  double s = 0;
  auto it = std::begin(q);
  for (const auto& x : p) {
    double pi = to_double(x), qi = to_double(*it++);
    if (pi == 0) continue;
    if (qi == 0) return kInf;
  }
  // log2(1 + chi^2) keeps d2(p, p) exactly zero.
  it = std::begin(q);
  for (const auto& x : p) {
    double pi = to_double(x), qi = to_double(*it++);
    if (qi > 0) s += (pi - qi) * (pi - qi) / qi;
  }
  return std::log1p(s) / std::log(2.0);
}

/// H2(p_XY | q_Y) = -log2 sum p(x,y)^2 / q(y).
template <class Range>
double collision_entropy_cond(const JointPmf& j, const Range& qy) {
  if (std::size(qy) != j.ny()) throw DimensionError("reference pmf has the wrong alphabet size");
  std::vector<double> q;
  for (const auto& v : qy) q.push_back(to_double(v));
  double s = 0;
  for (std::size_t y = 0; y < j.ny(); ++y) {
    double c = 0;
    for (std::size_t x = 0; x < j.nx(); ++x) c += j(x, y) * j(x, y);
    if (c == 0) continue;
    if (q[y] == 0) return -kInf;
    s += c / q[y];
  }
  return -std::log2(s);
}

/// Reference q_Y maximizing H2(p_XY | q_Y): q(y) proportional to sqrt(sum_x p(x,y)^2).
inline std::vector<double> collision_optimal_reference(const JointPmf& j) {
  std::vector<double> q(j.ny());
  double z = 0;
  for (std::size_t y = 0; y < j.ny(); ++y) {
    double c = 0;
    for (std::size_t x = 0; x < j.nx(); ++x) c += j(x, y) * j(x, y);
    q[y] = std::sqrt(c);
    z += q[y];
  }
  for (auto& v : q) v /= z;
  return q;
}

/// H2(p_XY | Y) = max over q_Y = -2 log2 sum_y sqrt(sum_x p(x,y)^2).
inline double collision_entropy_cond(const JointPmf& j) {
  double z = 0;
  for (std::size_t y = 0; y < j.ny(); ++y) {
    double c = 0;
    for (std::size_t x = 0; x < j.nx(); ++x) c += j(x, y) * j(x, y);
    z += std::sqrt(c);
  }
  return -2.0 * std::log2(z);
}

struct TypicalBound {
  double bound = 0;          // n (H(X|Y) - eps), clamped at 0
  double atypical_mass = 0;  // exact, or a Chebyshev upper bound
  bool exact_mass = true;
  bool certified = false;    // atypical_mass <= eps
  std::string note;
};

inline constexpr double kEnumerationCap = 4194304.0;  // 2^22

/// Lower bound n (H(X|Y) - eps) on the eps-smooth conditional collision
/// entropy of n i.i.d. copies, with the mass outside the conditional typical
/// set {|-(1/n) log2 p(x^n|y^n) - H(X|Y)| <= eps}.
inline TypicalBound typical_collision_bound(const JointPmf& j, int n, double eps) {
  if (n < 1) throw DomainError("block length must be at least 1");
  if (!(eps > 0)) throw DomainError("eps must be positive");
  const double h = conditional_entropy(j);
  TypicalBound out;
  out.bound = n * (h - eps);
  if (out.bound <= 0) {
    out.bound = 0;
    out.note = "eps >= H(X|Y): bound is vacuous";
  }
  struct Cell {
    double p, info;
  };
  std::vector<Cell> cells;
  for (std::size_t x = 0; x < j.nx(); ++x)
    for (std::size_t y = 0; y < j.ny(); ++y)
      if (j(x, y) > 0) cells.push_back({j(x, y), -std::log2(j(x, y) / j.py()[y])});
  const double space = std::pow(static_cast<double>(j.nx() * j.ny()), n);
  if (space <= kEnumerationCap) {
    double mass = 0;
    const double lo = n * (h - eps) - 1e-9, hi = n * (h + eps) + 1e-9;
    std::function<void(int, double, double)> walk = [&](int depth, double prob, double info) {
      if (depth == n) {
        if (info < lo || info > hi) mass += prob;
        return;
      }
      for (const auto& c : cells) walk(depth + 1, prob * c.p, info + c.info);
    };
    walk(0, 1.0, 0.0);
    out.atypical_mass = mass;
    out.exact_mass = true;
  } else {
    double var = 0;
    for (const auto& c : cells) var += c.p * (c.info - h) * (c.info - h);
    out.atypical_mass = std::min(1.0, var / (n * eps * eps));
    out.exact_mass = false;
  }
  out.certified = out.atypical_mass <= eps;
  if (!out.certified && out.note.empty()) out.note = "typical-set mass exceeds eps";
  return out;
}

}  // namespace entropy_games
