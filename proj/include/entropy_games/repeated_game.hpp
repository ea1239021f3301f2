#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entropy_games/errors.hpp"
#include "entropy_games/game.hpp"
#include "entropy_games/info.hpp"
#include "entropy_games/minentropy.hpp"
#include "entropy_games/randomness.hpp"
#include "entropy_games/rational.hpp"
#include "entropy_games/rng.hpp"

namespace entropy_games {

enum class BobKind { myopic, fixed_column, uniform };

struct BobSpec {
  BobKind kind = BobKind::myopic;
  std::size_t column = 0;  // fixed_column only
};

inline std::string to_string(const BobSpec& b) {
  switch (b.kind) {
    case BobKind::myopic: return "myopic";
    case BobKind::fixed_column: return "fixed:" + std::to_string(b.column);
    case BobKind::uniform: return "uniform";
  }
  return "";
}

/// Alice's target: p1 on the first ceil(gamma L) stages of a block, p2 after.
struct AliceTargets {
  ProbVector p1, p2;
  double gamma = 1;
  bool automatic = false;
};

struct RepeatedGameConfig {
  PayoffMatrix game;
  JointPmf source;
  int L = 10;
  int N = 50;
  std::optional<AliceTargets> targets;  // empty: pick from the envelope
  std::uint64_t seed = 0;
  BobSpec bob;
  double eps = 0.05;
  int envelope_grid = 129;
};

struct StageRecord {
  std::size_t t;
  std::uint32_t x, y, a, b;
  Rational payoff;
};

struct BlockRecord {
  std::size_t index;
  double tv_to_ideal;  // exact law of the block's actions against the ideal product
  Rational avg_payoff;  // realized
  std::optional<double> expected_payoff;  // non-adaptive Bob only
  std::optional<double> ideal_payoff;
};

struct SimulationTrace {
  std::vector<StageRecord> stages;
  std::vector<BlockRecord> blocks;
  Rational lambda_T;
  double theoretical_target = 0;
  AliceTargets targets;
  double target_rate = 0;
  double h_cond = 0;
  int ell = 0;
  double extractor_tv = 0;
  double simulator_tv = 0;
  double block_tv = 0;
  double payoff_scale = 0;  // M = max |u|
};

inline constexpr double kRepeatedXCap = 1048576.0;  // 2^20

/// J_cav at H(X|Y).
inline double theoretical_maxmin(const PayoffMatrix& g, const JointPmf& source, int grid = 129) {
  return J_cav(g, conditional_entropy(source), grid);
}

/// Envelope segment supporting h = H(X|Y)(1 - 1/L).
inline AliceTargets auto_targets(const PayoffMatrix& g, double h_cond, int L, int grid = 129) {
  const double h = h_cond * (1.0 - 1.0 / L);
  ConcaveEnvelope env(g, grid);
  auto [a, b] = env.segment(h);
  AliceTargets t{a.p, b.p, 1.0, true};
  if (b.h > a.h) t.gamma = std::clamp((b.h - h) / (b.h - a.h), 0.0, 1.0);
  return t;
}

/// Block-Markov strategy: block 1 plays action 0; block k >= 2 plays
/// psi(X^L of block k - 1).
class AliceBlockStrategy {
 public:
  AliceBlockStrategy(const RepeatedGameConfig& cfg, const AliceTargets& t)
      : map_(compose_block_map(cfg.source, cfg.L, t.p1, t.p2, t.gamma, cfg.eps, cfg.seed, false)) {}

  const BlockMap& map() const { return map_; }
  std::uint32_t first_block_action() const { return 0; }
  const std::vector<std::uint32_t>& block_actions(std::size_t prev_x_index) const { return map_(prev_x_index); }

 private:
  BlockMap map_;
};

namespace detail {
inline std::size_t argmin_column(const PayoffMatrix& g, const std::vector<double>& pa) {
  std::size_t best = 0;
  double best_val = kInf;
  for (std::size_t j = 0; j < g.cols(); ++j) {
    double v = 0;
    for (std::size_t a = 0; a < pa.size(); ++a)
      if (pa[a] > 0) v += pa[a] * g.at(a, j).get_d();
    if (j == 0 || v < best_val - 1e-12 * std::max(1.0, std::abs(best_val))) {
      best_val = v;
      best = j;
    }
  }
  return best;
}

inline std::size_t sample_cell(CounterRng& rng, const JointPmf& j) {
  double u = rng.uniform(), acc = 0;
  std::size_t last = 0;
  for (std::size_t x = 0; x < j.nx(); ++x)
    for (std::size_t y = 0; y < j.ny(); ++y) {
      if (j(x, y) <= 0) continue;
      last = x * j.ny() + y;
      acc += j(x, y);
      if (u < acc) return last;
    }
  return last;
}
}  // namespace detail

/// Myopic Bob: exact posterior of the current action given everything he has
/// seen, knowing Alice's map.
class BobMyopic {
 public:
  BobMyopic(const PayoffMatrix& g, const JointPmf& j, const BlockMap& m) : g_(g), j_(j), m_(m) {}

  // Start of a block k >= 2, given Y of block k - 1.
  void start_block(const std::vector<std::uint32_t>& prev_y) {
    post_.clear();
    const std::size_t space = m_.psi.size();
    const std::size_t nx = j_.nx();
    for (std::size_t x = 0; x < space; ++x) {
      double w = 1;
      std::size_t rest = x;
      for (int t = m_.L - 1; t >= 0 && w > 0; --t) {
        w *= j_(rest % nx, prev_y[t]);
        rest /= nx;
      }
      if (w > 0) post_.push_back({x, w});
    }
  }

  std::size_t play(std::size_t s) const {
    std::vector<double> pa(g_.rows(), 0.0);
    for (const auto& e : post_) pa[m_(e.x)[s]] += e.w;
    return detail::argmin_column(g_, pa);
  }

  void observe(std::size_t s, std::uint32_t a) {
    std::erase_if(post_, [&](const Weighted& e) { return m_(e.x)[s] != a; });
  }

 private:
  struct Weighted {
    std::size_t x;
    double w;
  };
  const PayoffMatrix& g_;
  const JointPmf& j_;
  const BlockMap& m_;
  std::vector<Weighted> post_;
};

/// Simulates T = (1 + N) L stages.
inline SimulationTrace run_repeated_game(const RepeatedGameConfig& cfg) {
  const auto& g = cfg.game;
  const auto& src = cfg.source;
  if (cfg.L < 1 || cfg.N < 1) throw DomainError("L and N must be at least 1");
  if (src.nx() == 0) throw ValidationError("empty source");
  if (std::pow(static_cast<double>(src.nx()), cfg.L) > kRepeatedXCap)
    throw CapExceeded("combinatorial blow-up: |X|^L exceeds 2^20");
  if (cfg.bob.kind == BobKind::fixed_column && cfg.bob.column >= g.cols())
    throw DimensionError("fixed column out of range");

  SimulationTrace tr;
  tr.h_cond = conditional_entropy(src);
  tr.targets = cfg.targets ? *cfg.targets : auto_targets(g, tr.h_cond, cfg.L, cfg.envelope_grid);
  if (tr.targets.p1.size() != g.rows() || tr.targets.p2.size() != g.rows())
    throw DimensionError("targets must be pmfs over Alice's actions");
  tr.theoretical_target = J_cav(g, tr.h_cond, cfg.envelope_grid);
  tr.payoff_scale = g.max_abs().get_d();

  AliceBlockStrategy alice(cfg, tr.targets);
  const BlockMap& m = alice.map();
  tr.target_rate = m.target_rate;
  tr.ell = m.ell;
  tr.extractor_tv = m.extractor.measured_tv;
  tr.simulator_tv = m.simulator.measured_tv.get_d();

  // Exact law of a block's actions: push p_X^L through psi.
  const auto& leaves = m.simulator.leaves;
  std::vector<double> law(leaves.size(), 0.0);
  {
    const std::size_t nx = src.nx();
    for (std::size_t x = 0; x < m.psi.size(); ++x) {
      double p = 1;
      std::size_t rest = x;
      for (int t = 0; t < cfg.L; ++t) {
        p *= src.px()[rest % nx];
        rest /= nx;
      }
      law[m.psi[x]] += p;
    }
    double tv = 0;
    for (std::size_t i = 0; i < leaves.size(); ++i) tv += std::max(0.0, law[i] - leaves[i].target.get_d());
    tr.block_tv = std::min(1.0, tv);
  }

  // Expected and ideal block payoffs against a non-adaptive Bob.
  std::vector<double> bob_mix(g.cols(), 0.0);
  if (cfg.bob.kind == BobKind::fixed_column) bob_mix[cfg.bob.column] = 1;
  if (cfg.bob.kind == BobKind::uniform) std::fill(bob_mix.begin(), bob_mix.end(), 1.0 / g.cols());
  auto stage_value = [&](std::size_t a) {
    double v = 0;
    for (std::size_t j = 0; j < g.cols(); ++j) v += bob_mix[j] * g.at(a, j).get_d();
    return v;
  };
  double expected_block = 0, ideal_block = 0;
  if (cfg.bob.kind != BobKind::myopic) {
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (law[i] == 0) continue;
      double s = 0;
      for (auto a : leaves[i].sequence) s += stage_value(a);
      expected_block += law[i] * s / cfg.L;
    }
    SourceTarget target{tr.targets.p1, tr.targets.p2, tr.targets.gamma, cfg.L};
    for (int t = 0; t < cfg.L; ++t) {
      const auto& p = target.at(t);
      for (std::size_t a = 0; a < p.size(); ++a) ideal_block += p[a].get_d() * stage_value(a) / cfg.L;
    }
  }

  CounterRng src_rng(cfg.seed, "repeated/source"), bob_rng(cfg.seed, "repeated/bob");
  BobMyopic bob(g, src, m);
  std::vector<std::uint32_t> prev_x, prev_y, cur_x(cfg.L), cur_y(cfg.L);
  Rational total(0);
  std::size_t t_global = 0;
  const std::size_t nx = src.nx();
  for (int k = 0; k <= cfg.N; ++k) {
    const std::vector<std::uint32_t>* actions = nullptr;
    if (k > 0) {
      std::size_t idx = 0;
      for (auto x : prev_x) idx = idx * nx + x;
      actions = &alice.block_actions(idx);
      if (cfg.bob.kind == BobKind::myopic) bob.start_block(prev_y);
    }
    Rational block_sum(0);
    for (int s = 0; s < cfg.L; ++s, ++t_global) {
      const std::size_t cell = detail::sample_cell(src_rng, src);
      cur_x[s] = static_cast<std::uint32_t>(cell / src.ny());
      cur_y[s] = static_cast<std::uint32_t>(cell % src.ny());
      const std::uint32_t a = actions ? (*actions)[s] : alice.first_block_action();
      std::size_t b = 0;
      switch (cfg.bob.kind) {
        case BobKind::myopic: {
          if (actions) {
            b = bob.play(s);
          } else {
            std::vector<double> pa(g.rows(), 0.0);
            pa[a] = 1;
            b = detail::argmin_column(g, pa);
          }
          break;
        }
        case BobKind::fixed_column: b = cfg.bob.column; break;
        case BobKind::uniform: b = bob_rng.below(g.cols()); break;
      }
      if (actions && cfg.bob.kind == BobKind::myopic) bob.observe(s, a);
      const Rational& u = g.at(a, b);
      tr.stages.push_back({t_global, cur_x[s], cur_y[s], a, static_cast<std::uint32_t>(b), u});
      block_sum += u;
    }
    total += block_sum;
    BlockRecord br{static_cast<std::size_t>(k), k == 0 ? 0.0 : tr.block_tv, block_sum / cfg.L, {}, {}};
    if (cfg.bob.kind != BobKind::myopic) {
      if (k == 0) {
        br.expected_payoff = stage_value(alice.first_block_action());
        br.ideal_payoff = br.expected_payoff;
      } else {
        br.expected_payoff = expected_block;
        br.ideal_payoff = ideal_block;
      }
    }
    tr.blocks.push_back(br);
    prev_x = cur_x;
    prev_y = cur_y;
  }
  tr.lambda_T = total / static_cast<long>(t_global);
  return tr;
}

}  // namespace entropy_games
