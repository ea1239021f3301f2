#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "entropy_games/errors.hpp"
#include "entropy_games/game.hpp"
#include "entropy_games/info.hpp"
#include "entropy_games/lp.hpp"
#include "entropy_games/minentropy.hpp"
#include "entropy_games/rational.hpp"
#include "entropy_games/rng.hpp"

namespace entropy_games {

/// A real value that may carry a note (for instance an infinite bound).
struct NotedValue {
  double value = 0;
  std::string note;
};

namespace detail {
inline void check_separation_order(const PayoffMatrix& g, const Rational& w1, const Rational& w2) {
  const Rational wstar = game_value(g).optimum;
  if (!(g.v() <= w2 && w2 <= w1 && w1 <= wstar))
    throw DomainError("need v <= w2 <= w1 <= w*; got w1 = " + to_string(w1) + ", w2 = " + to_string(w2) +
                      ", v = " + to_string(g.v()) + ", w* = " + to_string(wstar));
}
}  // namespace detail

/// Lower bound on the total variation distance between P^c_U(w2) and P_U(w1).
inline Rational d1_separation_bound(const PayoffMatrix& g, const Rational& w1, const Rational& w2) {
  detail::check_separation_order(g, w1, w2);
  if (g.m_hi() == g.m_lo()) return 0;
  return (w1 - w2) / (g.m_hi() - g.m_lo());
}

/// (w1 - w2)^2 / ((w1 - m_lo)(m_hi - w1)), the smallest chi^2 compatible with
/// a mean shift from w1 down to w2 of a variable supported on [m_lo, m_hi].
inline NotedValue variance_ratio_bound(const Rational& w1, const Rational& w2, const Rational& lo, const Rational& hi) {
  if (!(lo <= w2 && w2 <= w1 && w1 <= hi))
    throw DomainError("need m_lo <= w2 <= w1 <= m_hi");
  if (w1 == w2) return {0, ""};
  const Rational den = (w1 - lo) * (hi - w1);
  if (den == 0) return {kInf, "w1 sits at an end of [m_lo, m_hi]: variance is zero"};
  return {Rational((w1 - w2) * (w1 - w2) / den).get_d(), ""};
}

/// g(mu) = (mu - w2)^2 / ((m_hi - mu)(mu - m_lo)).
inline double variance_ratio_g(double mu, double w2, double lo, double hi) {
  const double den = (hi - mu) * (mu - lo);
  if (den <= 0) return kInf;
  return (mu - w2) * (mu - w2) / den;
}

/// Lower bound in bits on D2(p || q) for p outside P_U(w2), q inside P_U(w1).
inline NotedValue d2_separation_bound(const PayoffMatrix& g, const Rational& w1, const Rational& w2) {
  detail::check_separation_order(g, w1, w2);
  if (w1 == w2) return {0, ""};
  const Rational den = (w1 - g.m_lo()) * (g.m_hi() - w1);
  if (den == 0) return {kInf, "w1 = m_hi: bound is infinite"};
  return {std::log2(Rational(1 + (w1 - w2) * (w1 - w2) / den).get_d()), ""};
}

struct ChapmanRobbins {
  double chi2 = 0;
  double ratio = 0;
  double gap = 0;
  bool support_violation = false;
};

/// chi^2(p || q) against the moment ratio (E_q[W] - E_p[W])^2 / Var_q[W] for
/// W = x(A).
inline ChapmanRobbins chapman_robbins(const std::vector<double>& p, const std::vector<double>& q,
                                      const std::vector<double>& x) {
  if (p.size() != q.size() || p.size() != x.size()) throw DimensionError("chapman_robbins: length mismatch");
  ChapmanRobbins out;
  double eq = 0, ep = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q[i] == 0) {
      if (p[i] > 0) out.support_violation = true;
    } else {
      out.chi2 += (p[i] - q[i]) * (p[i] - q[i]) / q[i];
    }
    eq += q[i] * x[i];
    ep += p[i] * x[i];
  }
  double var = 0;
  for (std::size_t i = 0; i < p.size(); ++i) var += q[i] * (x[i] - eq) * (x[i] - eq);
  if (out.support_violation) out.chi2 = kInf;
  const double shift = (eq - ep) * (eq - ep);
  if (var == 0) {
    if (shift > 0) {
      out.ratio = kInf;
      out.support_violation = true;
    }
  } else {
    out.ratio = shift / var;
  }
  out.gap = (std::isinf(out.chi2) && std::isinf(out.ratio)) ? 0.0 : out.chi2 - out.ratio;
  return out;
}

struct SeparationCheck {
  Rational w1, w2;
  std::size_t n_samples = 0;  // random pairs drawn
  std::size_t vertex_pairs = 0;
  std::size_t pairs_checked = 0;
  double min_observed_d1 = kInf;
  double min_observed_d2 = kInf;
  double bound_d1 = 0;
  double bound_d2 = 0;
  std::size_t violations = 0;
  bool partial = false;  // rejection sampling ran out of attempts
  std::size_t q_fallbacks = 0;
  std::string diagnostic;
};

inline constexpr double kSeparationTolD1 = 1e-12;
inline constexpr double kSeparationTolD2 = 1e-9;
inline constexpr std::size_t kSeparationAttemptCap = 1000000;

namespace detail {
inline std::vector<double> dirichlet_point(CounterRng& rng, std::size_t n) {
  std::vector<double> p(n);
  double s = 0;
  for (auto& x : p) s += (x = rng.exponential());
  for (auto& x : p) x /= s;
  return p;
}

inline std::vector<double> mixture_of(CounterRng& rng, const std::vector<std::vector<double>>& points) {
  auto wts = dirichlet_point(rng, points.size());
  std::vector<double> q(points[0].size(), 0.0);
  for (std::size_t k = 0; k < points.size(); ++k)
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += wts[k] * points[k][i];
  return q;
}

// Points just outside P_U(w2): each vertex moved towards the row that is worst
// for one of its tight columns, plus pure rows whose security is below w2.
inline std::vector<ProbVector> complement_boundary_points(const PayoffMatrix& g, const Rational& w2,
                                                          const VertexSet& vs) {
  const std::size_t n = g.rows();
  const Rational delta = frac(1, 1000000);
  std::vector<ProbVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto e = ProbVector::point_mass(n, i);
    if (security_level(g, e) < w2) out.push_back(e);
  }
  for (const auto& p : vs.vertices)
    for (std::size_t j = 0; j < g.cols(); ++j) {
      if (column_payoff(g, p, j) != w2) continue;
      std::size_t k = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (g.at(i, j) < g.at(k, j)) k = i;
      if (!(g.at(k, j) < w2)) continue;
      RationalVector moved(n);
      for (std::size_t i = 0; i < n; ++i) moved[i] = (1 - delta) * p[i] + (i == k ? delta : Rational(0));
      out.emplace_back(moved);
    }
  return out;
}
}  // namespace detail

/// Empirical check of both separation bounds on random and extremal pairs
/// (p, q) with p outside P_U(w2) and q inside P_U(w1).
inline SeparationCheck sample_check_separation(const PayoffMatrix& g, const Rational& w1, const Rational& w2,
                                               std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw DomainError("n_samples must be at least 1");
  SeparationCheck out;
  out.w1 = w1;
  out.w2 = w2;
  out.bound_d1 = d1_separation_bound(g, w1, w2).get_d();
  out.bound_d2 = d2_separation_bound(g, w1, w2).value;
  const std::size_t n = g.rows();

  auto check = [&](const std::vector<double>& p, const std::vector<double>& q) {
    const double d1 = tv_distance(p, q), d2 = d2_divergence(p, q);
    ++out.pairs_checked;
    out.min_observed_d1 = std::min(out.min_observed_d1, d1);
    out.min_observed_d2 = std::min(out.min_observed_d2, d2);
    const bool bad1 = d1 < out.bound_d1 - kSeparationTolD1;
    const bool bad2 = d2 < out.bound_d2 - kSeparationTolD2;
    if (bad1 || bad2) {
      if (out.violations == 0) {
        std::string s = "violation: d1 = " + std::to_string(d1) + ", d2 = " + std::to_string(d2) + " at p = (";
        for (double x : p) s += std::to_string(x) + " ";
        s += "), q = (";
        for (double x : q) s += std::to_string(x) + " ";
        out.diagnostic = s + ")";
      }
      ++out.violations;
    }
  };

  const auto inner = polytope_vertices(g, w1);
  std::vector<std::vector<double>> inner_pts;
  for (const auto& v : inner.vertices) inner_pts.push_back(to_doubles(v.probs()));
  const auto boundary = detail::complement_boundary_points(g, w2, polytope_vertices(g, w2));

  // Deterministic extremal pairs.
  for (const auto& p : boundary)
    for (const auto& q : inner_pts) {
      check(to_doubles(p.probs()), q);
      ++out.vertex_pairs;
    }
  if (boundary.empty() || inner_pts.empty()) return out;  // one side is empty: nothing to separate

  const double w1d = w1.get_d(), w2d = w2.get_d();
  CounterRng rp(seed, "separation/p"), rq(seed, "separation/q"), rmix(seed, "separation/mix");
  std::size_t attempts = 0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    std::vector<double> p;
    while (attempts < kSeparationAttemptCap) {
      ++attempts;
      auto c = detail::dirichlet_point(rp, n);
      if (security_level(g, ProbVectorF(c)) < w2d) {
        p = std::move(c);
        break;
      }
    }
    if (p.empty()) {
      out.partial = true;
      break;
    }
    // q: rejection first; a thin P_U(w1) falls back to a random mixture of its vertices.
    std::vector<double> q;
    for (int t = 0; t < 64 && attempts < kSeparationAttemptCap; ++t) {
      ++attempts;
      auto c = detail::dirichlet_point(rq, n);
      if (security_level(g, ProbVectorF(c)) >= w1d) {
        q = std::move(c);
        break;
      }
    }
    if (q.empty()) {
      q = detail::mixture_of(rmix, inner_pts);
      ++out.q_fallbacks;
    }
    check(p, q);
    ++out.n_samples;
  }
  return out;
}

}  // namespace entropy_games
