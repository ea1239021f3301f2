#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "entropy_games/errors.hpp"
#include "entropy_games/game.hpp"
#include "entropy_games/info.hpp"
#include "entropy_games/lp.hpp"
#include "entropy_games/rational.hpp"

namespace entropy_games {

struct VertexOptions {
  std::size_t max_rows = 10;
  double max_subsets = 2e6;
};

/// Vertices of P_U(w) = {p in simplex : p^T U >= w}. Constraint index i < n
/// is p_i >= 0; index n + j is the column-j payoff constraint.
struct VertexSet {
  Rational w;
  std::vector<ProbVector> vertices;
  std::vector<std::vector<std::size_t>> active_sets;
};

inline double binomial(std::size_t a, std::size_t b) {
  if (b > a) return 0;
  double r = 1;
  for (std::size_t i = 1; i <= b; ++i) r = r * static_cast<double>(a - b + i) / static_cast<double>(i);
  return std::round(r);
}

namespace detail {

// Solves the square system m x = rhs exactly; nullopt when singular.
inline std::optional<RationalVector> solve_square(std::vector<RationalVector> m, RationalVector rhs) {
  const std::size_t n = m.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(m[piv], m[c]);
    std::swap(rhs[piv], rhs[c]);
    const Rational inv = 1 / m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      const Rational f = m[r][c] * inv;
      for (std::size_t k = c; k < n; ++k)
        if (m[c][k] != 0) m[r][k] -= f * m[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  RationalVector x(n);
  for (std::size_t c = n; c-- > 0;) {
    Rational s = rhs[c];
    for (std::size_t k = c + 1; k < n; ++k) s -= m[c][k] * x[k];
    x[c] = s / m[c][c];
  }
  return x;
}

}  // namespace detail

inline VertexSet polytope_vertices(const PayoffMatrix& g, const Rational& w, const VertexOptions& opt = {}) {
  const std::size_t n = g.rows(), nc = g.cols(), total = n + nc;
  const double count = binomial(total, n - 1);
  if (n > opt.max_rows || count > opt.max_subsets)
    throw CapExceeded("combinatorial blow-up: " + std::to_string(n) + " rows and " + std::to_string(nc) +
                      " columns give C(" + std::to_string(total) + "," + std::to_string(n - 1) +
                      ") = " + std::to_string(static_cast<long long>(count)) + " candidate subsets (cap " +
                      std::to_string(opt.max_rows) + " rows, " +
                      std::to_string(static_cast<long long>(opt.max_subsets)) + " subsets)");
  auto constraint_row = [&](std::size_t c) {
    RationalVector a(n, Rational(0));
    if (c < n)
      a[c] = 1;
    else
      for (std::size_t i = 0; i < n; ++i) a[i] = g.at(i, c - n);
    return a;
  };
  auto constraint_rhs = [&](std::size_t c) { return c < n ? Rational(0) : w; };

  std::set<RationalVector> seen;
  VertexSet out;
  out.w = w;
  std::vector<std::size_t> pick(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) pick[i] = i;
  while (true) {
    std::vector<RationalVector> m;
    RationalVector rhs;
    for (std::size_t c : pick) {
      m.push_back(constraint_row(c));
      rhs.push_back(constraint_rhs(c));
    }
    m.emplace_back(n, Rational(1));
    rhs.emplace_back(1);
    if (auto x = detail::solve_square(std::move(m), std::move(rhs))) {
      bool ok = std::all_of(x->begin(), x->end(), [](const Rational& q) { return q >= 0; });
      std::vector<std::size_t> active;
      for (std::size_t c = 0; ok && c < total; ++c) {
        Rational lhs(0);
        if (c < n)
          lhs = (*x)[c];
        else
          for (std::size_t i = 0; i < n; ++i) lhs += (*x)[i] * g.at(i, c - n);
        const Rational b = constraint_rhs(c);
        if (lhs < b) ok = false;
        if (lhs == b) active.push_back(c);
      }
      if (ok && seen.insert(*x).second) {
        out.vertices.emplace_back(std::move(*x));
        out.active_sets.push_back(std::move(active));
      }
    }
    // Next (n-1)-subset in lexicographic order.
    std::size_t k = n - 1;
    while (k > 0 && pick[k - 1] == total - (n - 1) + (k - 1)) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t i = k; i < n - 1; ++i) pick[i] = pick[i - 1] + 1;
  }
  return out;
}

struct MinEntropyPoint {
  double entropy = kInf;
  std::optional<ProbVector> argmin;
};

/// Minimum-entropy vertex of P_U(w); empty polytope gives +inf.
inline MinEntropyPoint min_entropy_point(const PayoffMatrix& g, const Rational& w, const VertexOptions& opt = {}) {
  MinEntropyPoint out;
  if (w <= g.v()) {
    out.entropy = 0;
    out.argmin = ProbVector::point_mass(g.rows(), g.v_row());
    return out;
  }
  for (const auto& p : polytope_vertices(g, w, opt).vertices) {
    double h = entropy(p);
    if (h < out.entropy) {
      out.entropy = h;
      out.argmin = p;
    }
  }
  return out;
}

/// F_U(w) = min{H(p) : p in P_U(w)}.
inline double min_entropy_F(const PayoffMatrix& g, const Rational& w, const VertexOptions& opt = {}) {
  return min_entropy_point(g, w, opt).entropy;
}

/// J(h) = max{w : F(w) <= h} by 64 bisection steps on [v, w*].
inline double J_of_h(const PayoffMatrix& g, double h, const VertexOptions& opt = {}) {
  if (!(h >= 0)) throw DomainError("entropy budget must be nonnegative");
  const Rational wstar = game_value(g).optimum;
  if (min_entropy_F(g, wstar, opt) <= h) return wstar.get_d();
  Rational lo = g.v(), hi = wstar;
  for (int it = 0; it < 64; ++it) {
    Rational mid = (lo + hi) / 2;
    if (min_entropy_F(g, mid, opt) <= h)
      lo = mid;
    else
      hi = mid;
  }
  return Rational((lo + hi) / 2).get_d();
}

struct EnvelopePoint {
  double h;
  Rational w;
  ProbVector p;  // a minimum-entropy strategy securing w
};

/// Upper concave envelope of the sampled curve (F(w), w) on [v, w*].
class ConcaveEnvelope {
 public:
  ConcaveEnvelope(const PayoffMatrix& g, int grid_size, const VertexOptions& opt = {}) {
    if (grid_size < 3) throw DomainError("grid_size must be at least 3");
    const Rational wstar = game_value(g).optimum;
    resolution_ = Rational((wstar - g.v()) / (grid_size - 1)).get_d();
    std::vector<EnvelopePoint> samples;
    for (int k = 0; k < grid_size; ++k) {
      Rational w = g.v() + (wstar - g.v()) * k / (grid_size - 1);
      auto mp = min_entropy_point(g, w, opt);
      samples.push_back({mp.entropy, w, *mp.argmin});
      if (wstar == g.v()) break;
    }
    // Monotone-chain upper hull; samples are increasing in w and in h.
    for (auto& s : samples) {
      if (!hull_.empty() && s.h <= hull_.back().h) {
        if (s.w > hull_.back().w) hull_.back() = s;
        continue;
      }
      while (hull_.size() >= 2) {
        const auto& a = hull_[hull_.size() - 2];
        const auto& b = hull_.back();
        double cross = (b.h - a.h) * (s.w.get_d() - a.w.get_d()) - (b.w.get_d() - a.w.get_d()) * (s.h - a.h);
        if (cross >= 0)
          hull_.pop_back();
        else
          break;
      }
      hull_.push_back(s);
    }
  }

  double operator()(double h) const {
    if (h <= hull_.front().h) return hull_.front().w.get_d();
    if (h >= hull_.back().h) return hull_.back().w.get_d();
    auto [a, b] = segment(h);
    double t = (h - a.h) / (b.h - a.h);
    return a.w.get_d() + t * (b.w.get_d() - a.w.get_d());
  }

  // Hull segment [a, b] with a.h <= h < b.h; a == b past the last point.
  std::pair<EnvelopePoint, EnvelopePoint> segment(double h) const {
    if (h >= hull_.back().h) return {hull_.back(), hull_.back()};
    for (std::size_t i = 1; i < hull_.size(); ++i)
      if (h < hull_[i].h) return {hull_[i - 1], hull_[i]};
    return {hull_.back(), hull_.back()};
  }

  const std::vector<EnvelopePoint>& hull() const { return hull_; }
  double resolution() const { return resolution_; }

 private:
  std::vector<EnvelopePoint> hull_;
  double resolution_ = 0;
};

inline double J_cav(const PayoffMatrix& g, double h, int grid_size = 129, const VertexOptions& opt = {}) {
  if (!(h >= 0)) throw DomainError("entropy budget must be nonnegative");
  return ConcaveEnvelope(g, grid_size, opt)(h);
}

/// G1: -log2 of the largest probability any strategy in P_U(w) can put on one
/// action. The relaxed form replaces each LP by incentive_value(e_i) - w.
inline double bound_G1(const PayoffMatrix& g, const Rational& w, bool relaxed) {
  const std::size_t n = g.rows();
  const Rational wstar = game_value(g).optimum;
  if (w > wstar) return kInf;
  Rational best(0);
  for (std::size_t i = 0; i < n; ++i) {
    Rational val;
    if (relaxed) {
      val = incentive_value(g, unit_vector(n, i)) - w;
    } else {
      auto sol = max_linear_over_polytope(g, w, unit_vector(n, i));
      if (sol.status != LpStatus::feasible) return kInf;
      val = sol.optimum;
    }
    if (i == 0 || val > best) best = val;
  }
  if (best <= 0) return kInf;
  return -std::log2(best.get_d());
}

struct ClosedFormBounds {
  double G2, G3, G4;
};

inline double binary_entropy(double p) { return detail::plogp(p) + detail::plogp(1 - p); }

inline ClosedFormBounds bounds_closed_form(const PayoffMatrix& g, const Rational& w) {
  const Rational &lo = g.m_lo(), &hi = g.m_hi(), &v = g.v();
  if (w < v || w > hi) throw DomainError("w = " + to_string(w) + " lies outside [v, m_hi]");
  ClosedFormBounds out{0, 0, 0};
  if (w == v) return out;
  // G2
  const Rational den2 = (w - lo) * (hi - w);
  out.G2 = den2 == 0 ? kInf : std::log2(Rational(1 + (w - v) * (w - v) / den2).get_d());
  // G3
  out.G3 = -std::log2(Rational(1 - (w - v) / (hi - lo)).get_d());
  // G4
  if (w == hi) {
    out.G4 = kInf;
  } else {
    const Rational ratio = (hi - v) / (hi - w);
    const Rational k = floor_rational(ratio);
    const Rational r = (hi - w) / (hi - v);
    const Rational rest = 1 - k * r;
    out.G4 = k.get_d() * detail::plogp(r.get_d()) + detail::plogp(rest.get_d());
  }
  return out;
}

struct UpperBounds {
  double Q1, Q2, Q3;
  ProbVector nash;  // the maximin strategy behind h*
  double h_star;
};

inline UpperBounds bounds_upper(const PayoffMatrix& g, const Rational& w, const VertexOptions& opt = {}) {
  const std::size_t n = g.rows();
  const LpSolution val = game_value(g);
  const Rational& wstar = val.optimum;
  if (w < g.v() || w > wstar) throw DomainError("w = " + to_string(w) + " lies outside [v, w*]");
  UpperBounds out{kInf, kInf, kInf, *val.argmax, entropy(*val.argmax)};
  // Q1: mix the Nash strategy with the best pure action.
  const double frac = wstar == g.v() ? 1.0 : Rational((w - g.v()) / (wstar - g.v())).get_d();
  out.Q1 = std::min(out.h_star, frac * out.h_star + binary_entropy(frac));
  // Q2: entropy of each LP maximizer of p_i.
  for (std::size_t i = 0; i < n; ++i) {
    auto sol = max_linear_over_polytope(g, w, unit_vector(n, i));
    if (sol.status == LpStatus::feasible) out.Q2 = std::min(out.Q2, entropy(*sol.argmax));
  }
  // Q3: per column, the most entropic vertex on the face where that column is
  // tight; the smallest such value over columns. Empty faces are skipped.
  const VertexSet vs = polytope_vertices(g, w, opt);
  for (std::size_t j = 0; j < g.cols(); ++j) {
    double face_max = -1;
    for (std::size_t k = 0; k < vs.vertices.size(); ++k) {
      const auto& act = vs.active_sets[k];
      if (std::find(act.begin(), act.end(), n + j) != act.end())
        face_max = std::max(face_max, entropy(vs.vertices[k]));
    }
    if (face_max >= 0) out.Q3 = std::min(out.Q3, face_max);
  }
  return out;
}

struct BoundsRow {
  Rational w;
  double F, G1, G1_relaxed, G2, G3, G4, Q1, Q2, Q3;
};

struct BoundsReport {
  std::vector<BoundsRow> rows;
  Rational v, wstar, m_lo, m_hi;
  double h_star = 0;
  ProbVector nash;
};

inline constexpr double kSandwichTolerance = 1e-9;

/// Evaluates every bound on a grid of w in [v, w*] and enforces
/// max(G) <= F <= min(Q) + 1e-9 on each row.
inline BoundsReport bounds_report(const PayoffMatrix& g, const std::vector<Rational>& grid,
                                  const VertexOptions& opt = {}) {
  BoundsReport rep;
  const LpSolution val = game_value(g);
  rep.v = g.v();
  rep.wstar = val.optimum;
  rep.m_lo = g.m_lo();
  rep.m_hi = g.m_hi();
  rep.nash = *val.argmax;
  rep.h_star = entropy(rep.nash);
  for (const auto& w : grid) {
    const std::string at = " (at w = " + to_string(w) + ")";
    BoundsRow row;
    row.w = w;
    try {
      if (w < rep.v || w > rep.wstar) throw DomainError("w lies outside [v, w*]");
      row.F = min_entropy_F(g, w, opt);
      row.G1 = bound_G1(g, w, false);
      row.G1_relaxed = bound_G1(g, w, true);
      auto cf = bounds_closed_form(g, w);
      row.G2 = cf.G2;
      row.G3 = cf.G3;
      row.G4 = cf.G4;
      auto ub = bounds_upper(g, w, opt);
      row.Q1 = ub.Q1;
      row.Q2 = ub.Q2;
      row.Q3 = ub.Q3;
    } catch (const CapExceeded& e) {
      throw CapExceeded(e.what() + at);
    } catch (const DomainError& e) {
      throw DomainError(e.what() + at);
    }
    // The G2 formula divides by m_hi - w; cap the limit at F.
    if (std::isinf(row.G2)) row.G2 = row.F;
    const double lower = std::max({row.G1, row.G1_relaxed, row.G2, row.G3, row.G4});
    const double upper = std::min({row.Q1, row.Q2, row.Q3});
    if (lower > row.F + kSandwichTolerance || row.F > upper + kSandwichTolerance)
      throw InvariantViolation("bound sandwich violated" + at + ": max G = " + std::to_string(lower) +
                               ", F = " + std::to_string(row.F) + ", min Q = " + std::to_string(upper));
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

inline std::string format_bits(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0) x = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_bounds_csv(std::ostream& os, const BoundsReport& rep) {
  os << "w,F,G1,G1_relaxed,G2,G3,G4,Q1,Q2,Q3\r\n";
  for (const auto& r : rep.rows) {
    os << to_string(r.w);
    for (double x : {r.F, r.G1, r.G1_relaxed, r.G2, r.G3, r.G4, r.Q1, r.Q2, r.Q3}) os << ',' << format_bits(x);
    os << "\r\n";
  }
}

}  // namespace entropy_games
