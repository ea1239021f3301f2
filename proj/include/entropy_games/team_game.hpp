#pragma once

// Team maxmin with secret correlation: a team of m players faces an adversary
// who observes the team's actions through a noisy channel.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "entropy_games/errors.hpp"
#include "entropy_games/game.hpp"
#include "entropy_games/info.hpp"
#include "entropy_games/lp.hpp"
#include "entropy_games/rational.hpp"
#include "entropy_games/rng.hpp"

namespace entropy_games {

inline constexpr double kTeamSlackTol = 1e-10;
inline constexpr std::size_t kTeamMaxJoint = 8, kTeamMaxColumns = 4, kTeamMaxSignals = 8;
inline constexpr std::size_t kTeamGridCap = 1000000;

/// Joint actions are indexed in mixed radix, first player most significant.
class TeamGameSpec {
 public:
  TeamGameSpec(std::vector<std::size_t> players, PayoffMatrix payoff, std::vector<std::vector<double>> channel)
      : players_(std::move(players)), payoff_(std::move(payoff)), channel_(std::move(channel)) {
    if (players_.empty()) throw DimensionError("a team needs at least one player");
    std::size_t n = 1;
    for (std::size_t k : players_) {
      if (k == 0) throw DimensionError("every player needs at least one action");
      n *= k;
    }
    if (payoff_.rows() != n)
      throw DimensionError("payoff has " + std::to_string(payoff_.rows()) + " joint actions, expected " +
                           std::to_string(n));
    if (channel_.size() != n)
      throw DimensionError("channel has " + std::to_string(channel_.size()) + " rows, expected " +
                           std::to_string(n));
    signals_ = channel_[0].size();
    for (std::size_t a = 0; a < n; ++a) {
      if (channel_[a].size() != signals_)
        throw DimensionError("channel row " + std::to_string(a) + " has " + std::to_string(channel_[a].size()) +
                             " entries, expected " + std::to_string(signals_));
      double s = 0;
      for (double x : channel_[a]) {
        if (!std::isfinite(x) || x < 0) throw ValidationError("channel row " + std::to_string(a) + " has a bad entry");
        s += x;
      }
      if (std::abs(s - 1) > 1e-9) throw ValidationError("channel row " + std::to_string(a) + " does not sum to 1");
    }
    if (signals_ == 0) throw DimensionError("channel needs at least one signal");
    u_.resize(n, std::vector<double>(payoff_.cols()));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < payoff_.cols(); ++b) u_[a][b] = payoff_.at(a, b).get_d();
  }

  std::size_t num_players() const { return players_.size(); }
  const std::vector<std::size_t>& players() const { return players_; }
  std::size_t joint_actions() const { return payoff_.rows(); }
  std::size_t columns() const { return payoff_.cols(); }
  std::size_t signals() const { return signals_; }
  /// |Q| = 2|A|.
  std::size_t q_size() const { return 2 * joint_actions(); }
  const PayoffMatrix& payoff() const { return payoff_; }
  const std::vector<std::vector<double>>& channel() const { return channel_; }
  double u(std::size_t a, std::size_t b) const { return u_[a][b]; }

  std::vector<std::size_t> decode(std::size_t a) const {
    std::vector<std::size_t> out(players_.size());
    for (std::size_t i = players_.size(); i-- > 0;) {
      out[i] = a % players_[i];
      a /= players_[i];
    }
    return out;
  }

 private:
  std::vector<std::size_t> players_;
  PayoffMatrix payoff_;
  std::vector<std::vector<double>> channel_;
  std::size_t signals_ = 0;
  std::vector<std::vector<double>> u_;
};

/// S = A.
inline std::vector<std::vector<double>> perfect_channel(std::size_t joint) {
  std::vector<std::vector<double>> c(joint, std::vector<double>(joint, 0.0));
  for (std::size_t a = 0; a < joint; ++a) c[a][a] = 1;
  return c;
}

/// A single signal carrying nothing.
inline std::vector<std::vector<double>> constant_channel(std::size_t joint) {
  return std::vector<std::vector<double>>(joint, std::vector<double>{1.0});
}

/// Each player's action is kept with probability 1 - flip, otherwise replaced
/// by one of its other actions uniformly; S is the disturbed joint action.
inline std::vector<std::vector<double>> symmetric_noise_channel(const std::vector<std::size_t>& players, double flip) {
  if (!(flip >= 0 && flip <= 1)) throw DomainError("flip probability must lie in [0, 1]");
  std::size_t n = 1;
  for (auto k : players) n *= k;
  auto digits = [&](std::size_t a) {
    std::vector<std::size_t> d(players.size());
    for (std::size_t i = players.size(); i-- > 0;) {
      d[i] = a % players[i];
      a /= players[i];
    }
    return d;
  };
  std::vector<std::vector<double>> c(n, std::vector<double>(n, 1.0));
  for (std::size_t a = 0; a < n; ++a) {
    auto da = digits(a);
    for (std::size_t s = 0; s < n; ++s) {
      auto ds = digits(s);
      for (std::size_t i = 0; i < players.size(); ++i) {
        if (players[i] == 1) continue;
        c[a][s] *= da[i] == ds[i] ? 1 - flip : flip / static_cast<double>(players[i] - 1);
      }
    }
  }
  return c;
}

/// p(r) on |R| = 2, p(q|r) on |Q| = 2|A|, and p(a_i|q) for each player.
template <class T>
struct BasicTeamDistribution {
  std::vector<T> p_r;
  std::vector<std::vector<T>> p_q_given_r;
  std::vector<std::vector<std::vector<T>>> p_ai_given_q;  // [player][q][a_i]
};
using TeamDistribution = BasicTeamDistribution<double>;
using TeamDistributionExact = BasicTeamDistribution<Rational>;

inline TeamDistribution to_float(const TeamDistributionExact& d) {
  TeamDistribution out;
  out.p_r = to_doubles(d.p_r);
  for (const auto& row : d.p_q_given_r) out.p_q_given_r.push_back(to_doubles(row));
  for (const auto& player : d.p_ai_given_q) {
    out.p_ai_given_q.emplace_back();
    for (const auto& row : player) out.p_ai_given_q.back().push_back(to_doubles(row));
  }
  return out;
}

namespace detail {
template <class T>
void check_row(const std::vector<T>& row, std::size_t size, const std::string& what) {
  if (row.size() != size)
    throw DimensionError(what + " has " + std::to_string(row.size()) + " entries, expected " + std::to_string(size));
  T s(0);
  for (const auto& x : row) {
    if (!(x >= 0)) throw ValidationError(what + " has a negative entry");
    s += x;
  }
  if constexpr (std::is_same_v<T, double>) {
    if (std::abs(s - 1) > 1e-9) throw ValidationError(what + " does not sum to 1");
  } else {
    if (s != 1) throw ValidationError(what + " does not sum to 1");
  }
}
}  // namespace detail

template <class T>
void validate_team_distribution(const TeamGameSpec& spec, const BasicTeamDistribution<T>& d) {
  detail::check_row(d.p_r, 2, "p(r)");
  if (d.p_q_given_r.size() != 2) throw DimensionError("p(q|r) needs 2 rows");
  for (std::size_t r = 0; r < 2; ++r) detail::check_row(d.p_q_given_r[r], spec.q_size(), "p(q|r=" + std::to_string(r) + ")");
  if (d.p_ai_given_q.size() != spec.num_players()) throw DimensionError("p(a_i|q) needs one block per player");
  for (std::size_t i = 0; i < spec.num_players(); ++i) {
    if (d.p_ai_given_q[i].size() != spec.q_size())
      throw DimensionError("p(a_" + std::to_string(i + 1) + "|q) needs " + std::to_string(spec.q_size()) + " rows");
    for (std::size_t q = 0; q < spec.q_size(); ++q)
      detail::check_row(d.p_ai_given_q[i][q], spec.players()[i],
                        "p(a_" + std::to_string(i + 1) + "|q=" + std::to_string(q) + ")");
  }
}

namespace detail {
// p(a|q) = prod_i p(a_i|q), as a |Q| x |A| table.
template <class T>
std::vector<std::vector<T>> joint_given_q(const TeamGameSpec& spec, const BasicTeamDistribution<T>& d) {
  const std::size_t nq = spec.q_size(), na = spec.joint_actions();
  std::vector<std::vector<T>> out(nq, std::vector<T>(na));
  for (std::size_t a = 0; a < na; ++a) {
    auto digits = spec.decode(a);
    for (std::size_t q = 0; q < nq; ++q) {
      T p(1);
      for (std::size_t i = 0; i < digits.size(); ++i) p *= d.p_ai_given_q[i][q][digits[i]];
      out[q][a] = p;
    }
  }
  return out;
}

template <class T>
T payoff_as(const TeamGameSpec& spec, std::size_t a, std::size_t b) {
  if constexpr (std::is_same_v<T, double>)
    return spec.u(a, b);
  else
    return spec.payoff().at(a, b);
}
}  // namespace detail

/// pi(A|R) = sum_r p(r) min_b E[u_{A,b} | R = r].
template <class T>
T team_security(const TeamGameSpec& spec, const BasicTeamDistribution<T>& d) {
  validate_team_distribution(spec, d);
  auto paq = detail::joint_given_q(spec, d);
  T total(0);
  for (std::size_t r = 0; r < 2; ++r) {
    if (d.p_r[r] == 0) continue;
    std::optional<T> worst;
    for (std::size_t b = 0; b < spec.columns(); ++b) {
      T s(0);
      for (std::size_t q = 0; q < spec.q_size(); ++q) {
        if (d.p_q_given_r[r][q] == 0) continue;
        T inner(0);
        for (std::size_t a = 0; a < spec.joint_actions(); ++a) inner += paq[q][a] * detail::payoff_as<T>(spec, a, b);
        s += d.p_q_given_r[r][q] * inner;
      }
      if (!worst || s < *worst) worst = s;
    }
    total += d.p_r[r] * *worst;
  }
  return total;
}

/// H(QA|SR) - H(Q|R) under p(r,q) p(a|q) p(s|a); feasible iff >= -1e-10.
inline double entropy_constraint_slack(const TeamGameSpec& spec, const TeamDistribution& d) {
  validate_team_distribution(spec, d);
  auto paq = detail::joint_given_q(spec, d);
  const std::size_t nq = spec.q_size(), na = spec.joint_actions(), ns = spec.signals();
  double h_rqas = 0, h_rq = 0, h_r = 0;
  std::vector<double> p_rs(2 * ns, 0.0);
  for (std::size_t r = 0; r < 2; ++r) {
    h_r += detail::plogp(d.p_r[r]);
    for (std::size_t q = 0; q < nq; ++q) {
      const double prq = d.p_r[r] * d.p_q_given_r[r][q];
      h_rq += detail::plogp(prq);
      if (prq == 0) continue;
      for (std::size_t a = 0; a < na; ++a) {
        const double prqa = prq * paq[q][a];
        if (prqa == 0) continue;
        for (std::size_t s = 0; s < ns; ++s) {
          const double p = prqa * spec.channel()[a][s];
          h_rqas += detail::plogp(p);
          p_rs[r * ns + s] += p;
        }
      }
    }
  }
  const double h_rs = entropy(p_rs);
  return (h_rqas - h_rs) - (h_rq - h_r);
}

inline double entropy_constraint_slack(const TeamGameSpec& spec, const TeamDistributionExact& d) {
  return entropy_constraint_slack(spec, to_float(d));
}

/// Q and R constant, players independent with the given strategies.
inline TeamDistributionExact product_distribution(const TeamGameSpec& spec, const std::vector<ProbVector>& strategies) {
  if (strategies.size() != spec.num_players()) throw DimensionError("need one strategy per player");
  TeamDistributionExact d;
  d.p_r = {Rational(1), Rational(0)};
  RationalVector q0(spec.q_size(), Rational(0));
  q0[0] = 1;
  d.p_q_given_r = {q0, q0};
  for (std::size_t i = 0; i < spec.num_players(); ++i) {
    if (strategies[i].size() != spec.players()[i])
      throw DimensionError("strategy for player " + std::to_string(i + 1) + " has the wrong length");
    d.p_ai_given_q.emplace_back(spec.q_size(), strategies[i].probs());
  }
  return d;
}

/// w* of the flattened |A| x |B| matrix: the fully correlated upper bound.
inline Rational flattened_value(const TeamGameSpec& spec) { return game_value(spec.payoff()).optimum; }

struct ProductValue {
  Rational value;
  std::vector<ProbVector> strategies;
  std::size_t grid_points = 0;
  std::size_t refinement_rounds = 0;
};

namespace detail {
// All compositions of `total` into k nonnegative parts.
inline void compositions(std::size_t k, std::size_t total, std::vector<std::vector<std::size_t>>& out,
                         std::vector<std::size_t>& cur) {
  if (cur.size() + 1 == k) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::size_t x = 0; x <= total; ++x) {
    cur.push_back(x);
    compositions(k, total - x, out, cur);
    cur.pop_back();
  }
}

// Payoff matrix for player i against the others' fixed strategies.
inline PayoffMatrix induced_matrix(const TeamGameSpec& spec, const std::vector<ProbVector>& s, std::size_t i) {
  std::vector<RationalVector> rows(spec.players()[i], RationalVector(spec.columns(), Rational(0)));
  for (std::size_t a = 0; a < spec.joint_actions(); ++a) {
    auto digits = spec.decode(a);
    Rational w(1);
    for (std::size_t k = 0; k < digits.size() && w != 0; ++k)
      if (k != i) w *= s[k][digits[k]];
    if (w == 0) continue;
    for (std::size_t b = 0; b < spec.columns(); ++b) rows[digits[i]][b] += w * spec.payoff().at(a, b);
  }
  return PayoffMatrix(std::move(rows));
}

inline Rational product_security(const TeamGameSpec& spec, const std::vector<ProbVector>& s) {
  return security_level(induced_matrix(spec, s, 0), s[0]);
}

inline void check_tractable(const TeamGameSpec& spec) {
  if (spec.joint_actions() > kTeamMaxJoint || spec.columns() > kTeamMaxColumns || spec.signals() > kTeamMaxSignals)
    throw CapExceeded("combinatorial blow-up: team search needs |A| <= 8, |B| <= 4, |S| <= 8 (got " +
                      std::to_string(spec.joint_actions()) + ", " + std::to_string(spec.columns()) + ", " +
                      std::to_string(spec.signals()) + ")");
}
}  // namespace detail

namespace detail {
// Exact best-response LPs, one player at a time, until no player improves.
inline std::size_t polish_product(const TeamGameSpec& spec, std::vector<ProbVector>& s, Rational& value) {
  std::size_t rounds = 0;
  for (bool improved = true; improved && rounds < 100;) {
    improved = false;
    ++rounds;
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto sol = game_value(induced_matrix(spec, s, i));
      if (sol.optimum > value) {
        s[i] = *sol.argmax;
        value = sol.optimum;
        improved = true;
      }
    }
  }
  return rounds;
}

inline ProbVector round_dyadic(const RationalVector& y, int bits) {
  const mpz_class den = mpz_class(1) << bits;
  RationalVector out(y.size());
  Rational total(0);
  std::size_t big = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    mpz_class num = y[k].get_num() * den / y[k].get_den();  // floor, y >= 0
    out[k] = Rational(num, den);
    out[k].canonicalize();
    total += out[k];
    if (y[k] > y[big]) big = k;
  }
  out[big] += 1 - total;
  return ProbVector(std::move(out));
}

// Trust-region sequential LP on the joint product strategy. The worst-column
// payoff is multilinear, so each step maximizes its linearization over boxes
// of half-width delta; a step is kept only if the exact payoff rises.
inline void product_slp(const TeamGameSpec& spec, std::vector<ProbVector>& s, Rational& value) {
  const std::size_t m = s.size();
  std::size_t nv = 2;
  for (auto k : spec.players()) nv += k;
  Rational delta = frac(1, 2);
  const Rational min_delta = Rational(1, mpz_class(1) << 24);
  for (int iter = 0; iter < 400 && delta >= min_delta; ++iter) {
    std::vector<PayoffMatrix> grads;
    for (std::size_t i = 0; i < m; ++i) grads.push_back(induced_matrix(spec, s, i));
    LinearProgram lp;
    lp.num_vars = nv;
    lp.objective.assign(nv, Rational(0));
    lp.objective[nv - 2] = 1;
    lp.objective[nv - 1] = -1;
    std::size_t off = 0;
    for (std::size_t i = 0; i < m; ++i) {
      RationalVector sum(nv, Rational(0));
      for (std::size_t k = 0; k < spec.players()[i]; ++k) {
        sum[off + k] = 1;
        RationalVector e(nv, Rational(0));
        e[off + k] = 1;
        lp.rows.push_back({e, Sense::le, s[i][k] + delta});
        if (s[i][k] > delta) lp.rows.push_back({e, Sense::ge, s[i][k] - delta});
      }
      lp.rows.push_back({sum, Sense::eq, Rational(1)});
      off += spec.players()[i];
    }
    for (std::size_t b = 0; b < spec.columns(); ++b) {
      RationalVector a(nv, Rational(0));
      off = 0;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < spec.players()[i]; ++k) a[off + k] = grads[i].at(k, b);
        off += spec.players()[i];
      }
      a[nv - 2] = -1;
      a[nv - 1] = 1;
      lp.rows.push_back({a, Sense::ge, static_cast<long>(m - 1) * column_payoff(grads[0], s[0], b)});
    }
    auto r = solve_lp(lp);
    if (r.status != LpStatus::feasible || r.optimum <= value) {
      delta /= 2;
      continue;
    }
    std::vector<ProbVector> next;
    off = 0;
    for (std::size_t i = 0; i < m; ++i) {
      next.push_back(round_dyadic(RationalVector(r.x.begin() + off, r.x.begin() + off + spec.players()[i]), 24));
      off += spec.players()[i];
    }
    Rational v = product_security(spec, next);
    if (v > value) {
      s = std::move(next);
      value = v;
    } else {
      delta /= 2;
    }
  }
}
}  // namespace detail

/// max over product strategies of the worst-column payoff. A grid pass picks
/// starting points; each is refined by sequential LP and exact best-response
/// LPs. Deterministic; a local method, so the value is a lower bound in general.
inline ProductValue perfect_monitoring_value(const TeamGameSpec& spec, std::size_t grid = 8,
                                             std::size_t starts = 4) {
  detail::check_tractable(spec);
  if (grid < 1) throw DomainError("grid must be at least 1");
  const std::size_t m = spec.num_players();
  std::vector<std::vector<std::vector<std::size_t>>> options(m);
  double count = 1;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::size_t> cur;
    detail::compositions(spec.players()[i], grid, options[i], cur);
    count *= static_cast<double>(options[i].size());
  }
  if (count > kTeamGridCap) throw CapExceeded("combinatorial blow-up: product grid exceeds 10^6 points");

  // Grid pass in floating point.
  std::vector<std::pair<double, std::vector<std::size_t>>> scored;
  std::vector<std::size_t> idx(m, 0);
  std::vector<double> col(spec.columns());
  for (;;) {
    std::fill(col.begin(), col.end(), 0.0);
    for (std::size_t a = 0; a < spec.joint_actions(); ++a) {
      auto digits = spec.decode(a);
      double w = 1;
      for (std::size_t i = 0; i < m; ++i) w *= static_cast<double>(options[i][idx[i]][digits[i]]) / grid;
      if (w == 0) continue;
      for (std::size_t b = 0; b < spec.columns(); ++b) col[b] += w * spec.u(a, b);
    }
    scored.emplace_back(*std::min_element(col.begin(), col.end()), idx);
    std::size_t i = m;
    while (i-- > 0) {
      if (++idx[i] < options[i].size()) break;
      idx[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) { return x.first > y.first; });

  ProductValue out;
  out.grid_points = scored.size();
  for (std::size_t k = 0; k < std::min(starts, scored.size()); ++k) {
    std::vector<ProbVector> s;
    for (std::size_t i = 0; i < m; ++i) {
      RationalVector p;
      for (auto c : options[i][scored[k].second[i]]) p.push_back(frac(static_cast<long>(c), static_cast<long>(grid)));
      s.emplace_back(std::move(p));
    }
    Rational value = detail::product_security(spec, s);
    std::size_t rounds = detail::polish_product(spec, s, value);
    if (m > 1) {
      detail::product_slp(spec, s, value);
      rounds += detail::polish_product(spec, s, value);
    }
    if (k == 0 || value > out.value) {
      out.value = value;
      out.strategies = std::move(s);
      out.refinement_rounds = rounds;
    }
  }
  return out;
}

struct TeamSearchResult {
  double w_hat = -kInf;  // a feasible point's value: a lower bound on w
  std::optional<Rational> w_hat_exact;
  TeamDistribution best;
  std::optional<TeamDistributionExact> best_exact;
  double slack = 0;
  std::string origin;
  Rational upper_bound;  // flattened w*
  Rational product_value;
  std::size_t restarts_run = 0, restarts_interior = 0;
};

namespace detail {
class BarrierAscent {
 public:
  BarrierAscent(const TeamGameSpec& spec, TeamDistribution d) : spec_(spec), d_(std::move(d)) {
    rows_.push_back(&d_.p_r);
    for (auto& row : d_.p_q_given_r) rows_.push_back(&row);
    for (auto& player : d_.p_ai_given_q)
      for (auto& row : player) rows_.push_back(&row);
  }

  // Phi = pi_tau + mu log(slack), -inf outside the interior. pi_tau replaces
  // each min over columns by a soft minimum at temperature tau (tau = 0: exact).
  double phi(double mu, double tau) const {
    const double s = entropy_constraint_slack(spec_, d_);
    if (!(s > 0)) return -kInf;
    return (tau > 0 ? smoothed_security(tau) : team_security(spec_, d_)) + mu * std::log(s);
  }

  double smoothed_security(double tau) const {
    auto paq = joint_given_q(spec_, d_);
    double total = 0;
    std::vector<double> col(spec_.columns());
    for (std::size_t r = 0; r < 2; ++r) {
      if (d_.p_r[r] == 0) continue;
      std::fill(col.begin(), col.end(), 0.0);
      for (std::size_t q = 0; q < spec_.q_size(); ++q) {
        const double w = d_.p_q_given_r[r][q];
        if (w == 0) continue;
        for (std::size_t a = 0; a < spec_.joint_actions(); ++a)
          for (std::size_t b = 0; b < spec_.columns(); ++b) col[b] += w * paq[q][a] * spec_.u(a, b);
      }
      const double lo = *std::min_element(col.begin(), col.end());
      double z = 0;
      for (double c : col) z += std::exp(-(c - lo) / tau);
      total += d_.p_r[r] * (lo - tau * std::log(z));
    }
    return total;
  }

  void run(double mu, double tau) {
    double step = 0.1, cur = phi(mu, tau);
    std::vector<double> history{cur};
    for (int sweep = 0; sweep < 2000 && step >= 1e-7; ++sweep) {
      bool moved = false;
      for (auto* row : rows_)
        for (std::size_t from = 0; from < row->size(); ++from)
          for (std::size_t to = 0; to < row->size(); ++to) {
            if (from == to || (*row)[from] == 0) continue;
            const double delta = std::min(step, (*row)[from]);
            const double old_from = (*row)[from], old_to = (*row)[to];
            (*row)[from] = old_from - delta < 1e-12 ? 0.0 : old_from - delta;
            (*row)[to] = old_to + (old_from - (*row)[from]);
            const double next = phi(mu, tau);
            if (next > cur + 1e-15) {
              cur = next;
              moved = true;
            } else {
              (*row)[from] = old_from;
              (*row)[to] = old_to;
            }
          }
      if (!moved) step /= 2;
      history.push_back(cur);
      if (history.size() > 50 && cur - history[history.size() - 51] < 1e-9) break;
    }
  }

  const TeamDistribution& distribution() const { return d_; }

 private:
  const TeamGameSpec& spec_;
  TeamDistribution d_;
  std::vector<std::vector<double>*> rows_;
};

inline std::vector<double> dirichlet(CounterRng& rng, std::size_t k) {
  std::vector<double> p(k);
  double s = 0;
  for (auto& x : p) s += (x = rng.exponential());
  for (auto& x : p) x /= s;
  return p;
}

// Random start pulled towards a Q-independent play until the slack is positive.
inline std::optional<TeamDistribution> interior_start(const TeamGameSpec& spec, CounterRng rng) {
  TeamDistribution d;
  d.p_r = dirichlet(rng, 2);
  d.p_q_given_r = {dirichlet(rng, spec.q_size()), dirichlet(rng, spec.q_size())};
  std::vector<std::vector<std::vector<double>>> noise(spec.num_players());
  std::vector<std::vector<double>> common(spec.num_players());
  for (std::size_t i = 0; i < spec.num_players(); ++i) {
    common[i] = dirichlet(rng, spec.players()[i]);
    for (std::size_t q = 0; q < spec.q_size(); ++q) noise[i].push_back(dirichlet(rng, spec.players()[i]));
  }
  for (double tau = 1; tau > 1e-3; tau /= 2) {
    d.p_ai_given_q.assign(spec.num_players(), {});
    for (std::size_t i = 0; i < spec.num_players(); ++i)
      for (std::size_t q = 0; q < spec.q_size(); ++q) {
        std::vector<double> row(spec.players()[i]);
        for (std::size_t k = 0; k < row.size(); ++k) row[k] = (1 - tau) * common[i][k] + tau * noise[i][q][k];
        d.p_ai_given_q[i].push_back(std::move(row));
      }
    if (entropy_constraint_slack(spec, d) > 1e-9) return d;
  }
  return std::nullopt;
}

// Q = A drawn from a maximin strategy of the flattened game, R constant.
inline TeamDistributionExact correlated_distribution(const TeamGameSpec& spec, const ProbVector& joint) {
  TeamDistributionExact d;
  d.p_r = {Rational(1), Rational(0)};
  RationalVector pq(spec.q_size(), Rational(0));
  for (std::size_t a = 0; a < spec.joint_actions(); ++a) pq[a] = joint[a];
  d.p_q_given_r = {pq, pq};
  d.p_ai_given_q.resize(spec.num_players());
  for (std::size_t q = 0; q < spec.q_size(); ++q) {
    auto digits = spec.decode(q < spec.joint_actions() ? q : 0);
    for (std::size_t i = 0; i < spec.num_players(); ++i) {
      RationalVector row(spec.players()[i], Rational(0));
      row[digits[i]] = 1;
      d.p_ai_given_q[i].push_back(std::move(row));
    }
  }
  return d;
}
}  // namespace detail

/// Best feasible point among: the best product (always feasible), full
/// correlation when the channel allows it, and barrier ascent restarts.
/// Ties within 1e-9 keep the earlier candidate, exact ones first.
inline TeamSearchResult team_maxmin_search(const TeamGameSpec& spec, int restarts = 8, std::size_t grid = 8,
                                           std::uint64_t seed = 0) {
  detail::check_tractable(spec);
  if (restarts < 0) throw DomainError("restarts must be nonnegative");
  TeamSearchResult out;
  auto flat = game_value(spec.payoff());
  out.upper_bound = flat.optimum;

  auto product = perfect_monitoring_value(spec, grid);
  out.product_value = product.value;
  auto take_exact = [&](TeamDistributionExact d, const std::string& origin) {
    const double slack = entropy_constraint_slack(spec, d);
    if (slack < -kTeamSlackTol) return;
    Rational value = team_security(spec, d);
    if (out.w_hat_exact && value <= *out.w_hat_exact) return;
    out.w_hat = value.get_d();
    out.w_hat_exact = value;
    out.best = to_float(d);
    out.best_exact = std::move(d);
    out.slack = slack;
    out.origin = origin;
  };
  take_exact(product_distribution(spec, product.strategies), "product");
  take_exact(detail::correlated_distribution(spec, *flat.argmax), "full correlation");

  const CounterRng base(seed, "team/search");
  for (int k = 0; k < restarts; ++k) {
    ++out.restarts_run;
    auto start = detail::interior_start(spec, base.child(static_cast<std::uint64_t>(k)));
    if (!start) continue;
    ++out.restarts_interior;
    detail::BarrierAscent ascent(spec, *start);
    for (auto [mu, tau] : {std::pair{1e-2, 1e-1}, {1e-3, 3e-2}, {1e-4, 1e-2}, {1e-6, 1e-3}, {1e-8, 0.0}})
      ascent.run(mu, tau);
    const auto& d = ascent.distribution();
    const double slack = entropy_constraint_slack(spec, d);
    if (slack < -kTeamSlackTol) continue;
    const double value = team_security(spec, d);
    if (value > out.w_hat + 1e-9) {
      out.w_hat = value;
      out.w_hat_exact.reset();
      out.best = d;
      out.best_exact.reset();
      out.slack = slack;
      out.origin = "barrier restart " + std::to_string(k);
    }
  }
  return out;
}

}  // namespace entropy_games
