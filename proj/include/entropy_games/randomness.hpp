#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entropy_games/errors.hpp"
#include "entropy_games/game.hpp"
#include "entropy_games/info.hpp"
#include "entropy_games/rational.hpp"
#include "entropy_games/rng.hpp"

namespace entropy_games {

/// TV bound for hashing a source with collision entropy h2 down to ell bits;
/// eps > 0 adds the smoothing term 2 eps.
inline double leftover_bound(double h2, int ell, double eps) {
  if (ell < 0) throw DomainError("ell must be nonnegative");
  if (eps < 0) throw DomainError("eps must be nonnegative");
  const double core = 0.5 * std::exp2(-(h2 - ell) / 2);
  return eps > 0 ? 2 * eps + core : core;
}

// ---------------------------------------------------------------------------
// Block support of n i.i.d. pairs.

/// Enumerates the support of (X^n, Y^n) grouped by y^n. Indices are base-|X|
/// (base-|Y|) numbers with the first coordinate most significant.
class BlockSupport {
 public:
  struct Entry {
    std::uint32_t x;
    double p;
  };

  BlockSupport(const JointPmf& j, int n, double cap) : j_(j), n_(n) {
    if (n < 1) throw DomainError("block length must be at least 1");
    std::size_t cells = 0;
    for (std::size_t x = 0; x < j.nx(); ++x)
      for (std::size_t y = 0; y < j.ny(); ++y)
        if (j(x, y) > 0) ++cells;
    const double size = std::pow(static_cast<double>(cells), n);
    const double xspace = std::pow(static_cast<double>(j.nx()), n);
    if (size > cap || xspace > 4294967296.0)
      throw CapExceeded("combinatorial blow-up: support of (X^n, Y^n) has " + std::to_string(size) +
                        " points, cap " + std::to_string(cap));
    x_space_ = static_cast<std::size_t>(xspace);
  }

  int n() const { return n_; }
  std::size_t x_space() const { return x_space_; }

  /// f(p(y^n), entries with p(x^n, y^n) > 0).
  template <class F>
  void for_each_y(F&& f) const {
    std::vector<std::vector<Entry>> level(n_ + 1);
    level[0] = {{0, 1.0}};
    walk(0, 1.0, level, f);
  }

 private:
  template <class F>
  void walk(int t, double py, std::vector<std::vector<Entry>>& level, F& f) const {
    if (t == n_) {
      f(py, static_cast<const std::vector<Entry>&>(level[t]));
      return;
    }
    const auto nx = static_cast<std::uint32_t>(j_.nx());
    for (std::size_t y = 0; y < j_.ny(); ++y) {
      if (j_.py()[y] <= 0) continue;
      auto& next = level[t + 1];
      next.clear();
      for (const auto& e : level[t])
        for (std::uint32_t x = 0; x < nx; ++x) {
          const double c = j_(x, y);
          if (c > 0) next.push_back({e.x * nx + x, e.p * c});
        }
      walk(t + 1, py * j_.py()[y], level, f);
    }
  }

  const JointPmf& j_;
  int n_;
  std::size_t x_space_ = 0;
};

// ---------------------------------------------------------------------------
// Extractors.

enum class HashFamily { linear_gf2, random_table };

inline const char* to_string(HashFamily f) { return f == HashFamily::linear_gf2 ? "linear-gf2" : "random-table"; }

struct Extractor {
  int n = 0;
  int ell = 0;
  std::uint64_t seed = 0;
  std::uint64_t try_index = 0;
  HashFamily family = HashFamily::linear_gf2;
  std::vector<std::uint64_t> matrix;  // linear family: one bit mask per output bit
  std::vector<std::uint32_t> table;   // f(x^n) for every input index
  double measured_tv = 1;
  double certified_bound = kInf;
  bool certified = false;
  std::string note;

  std::uint32_t operator()(std::size_t x_index) const { return table.at(x_index); }
};

inline constexpr double kExtractorCap = 4194304.0;  // 2^22

namespace detail {
inline int bits_per_symbol(std::size_t nx) {
  int b = 0;
  while ((std::size_t{1} << b) < nx) ++b;
  return b;
}

inline bool is_power_of_two(std::size_t k) { return k > 0 && (k & (k - 1)) == 0; }

inline int parity(std::uint64_t x) { return __builtin_parityll(x); }
}  // namespace detail

/// Draws hash number `try_index` of the family for (seed, n, ell).
inline Extractor draw_extractor(std::size_t nx, int n, int ell, std::uint64_t seed, std::uint64_t try_index) {
  Extractor e;
  e.n = n;
  e.ell = ell;
  e.seed = seed;
  e.try_index = try_index;
  e.family = detail::is_power_of_two(nx) ? HashFamily::linear_gf2 : HashFamily::random_table;
  const std::size_t space = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(nx), n)));
  CounterRng rng = CounterRng(seed, "extractor").child(try_index);
  e.table.resize(space);
  if (e.family == HashFamily::linear_gf2) {
    const int nbits = detail::bits_per_symbol(nx) * n;
    const std::uint64_t mask = nbits >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << nbits) - 1);
    for (int r = 0; r < ell; ++r) e.matrix.push_back(rng() & mask);
    // With |X| = 2^b the base-|X| index is the concatenated bit string.
    for (std::size_t x = 0; x < space; ++x) {
      std::uint32_t z = 0;
      for (int r = 0; r < ell; ++r) z = (z << 1) | static_cast<std::uint32_t>(detail::parity(e.matrix[r] & x));
      e.table[x] = z;
    }
  } else {
    for (auto& z : e.table) z = static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << ell));
  }
  return e;
}

/// Exact TV between (f(X^n), Y^n) and uniform x p_{Y^n}.
inline double extractor_tv(const BlockSupport& s, const Extractor& e) {
  const double cells = std::exp2(e.ell);
  std::vector<double> hist(std::size_t{1} << e.ell, 0.0);
  std::vector<std::uint32_t> touched;
  double total = 0;
  s.for_each_y([&](double py, const std::vector<BlockSupport::Entry>& xs) {
    touched.clear();
    for (const auto& en : xs) {
      const std::uint32_t z = e.table[en.x];
      if (hist[z] == 0) touched.push_back(z);
      hist[z] += en.p;
    }
    const double u = py / cells;
    double part = (cells - static_cast<double>(touched.size())) * u;
    for (auto z : touched) {
      part += std::abs(hist[z] - u);
      hist[z] = 0;
    }
    total += part;
  });
  return std::min(1.0, total / 2);
}

/// extractor_tv for several draws with one pass over the support.
inline std::vector<double> extractor_tvs(const BlockSupport& s, const std::vector<Extractor>& es) {
  if (es.empty()) return {};
  const int ell = es[0].ell;
  const double cells = std::exp2(ell);
  const std::size_t k = es.size();
  std::vector<std::vector<double>> hist(k, std::vector<double>(std::size_t{1} << ell, 0.0));
  std::vector<std::vector<std::uint32_t>> touched(k);
  std::vector<double> total(k, 0.0);
  s.for_each_y([&](double py, const std::vector<BlockSupport::Entry>& xs) {
    const double u = py / cells;
    for (std::size_t i = 0; i < k; ++i) {
      auto& h = hist[i];
      auto& tch = touched[i];
      const auto& table = es[i].table;
      tch.clear();
      for (const auto& en : xs) {
        const std::uint32_t z = table[en.x];
        if (h[z] == 0) tch.push_back(z);
        h[z] += en.p;
      }
      double part = (cells - static_cast<double>(tch.size())) * u;
      for (auto z : tch) {
        part += std::abs(h[z] - u);
        h[z] = 0;
      }
      total[i] += part;
    }
  });
  for (auto& t : total) t = std::min(1.0, t / 2);
  return total;
}

/// Smallest applicable leftover bound for n copies of j: the plain form with
/// n H2(p|Y), and the smoothed form when the typical set certifies.
inline double extractor_certificate(const JointPmf& j, int n, int ell, double eps, std::string* note = nullptr) {
  double best = leftover_bound(n * collision_entropy_cond(j), ell, 0);
  if (eps > 0) {
    auto tb = typical_collision_bound(j, n, eps);
    if (tb.certified) {
      best = std::min(best, leftover_bound(tb.bound, ell, eps));
    } else if (note) {
      *note = "smoothed bound unavailable: " + tb.note;
    }
  }
  return best;
}

namespace detail {
inline Extractor search_extractor(const JointPmf& j, const BlockSupport& support, int ell, std::uint64_t seed,
                                  int max_tries, double eps) {
  const int n = support.n();
  std::string note;
  const double bound = extractor_certificate(j, n, ell, eps, &note);
  Extractor best;
  for (int t = 0; t < max_tries; ++t) {
    auto e = draw_extractor(j.nx(), n, ell, seed, static_cast<std::uint64_t>(t));
    e.measured_tv = extractor_tv(support, e);
    e.certified_bound = bound;
    // A bound of 1 or more holds for every map and certifies nothing.
    e.certified = bound < 1 && e.measured_tv <= bound;
    e.note = bound < 1 ? note : "certified bound is vacuous (>= 1)";
    if (e.certified) return e;
    if (t == 0 || e.measured_tv < best.measured_tv) best = std::move(e);
  }
  best.note = "no draw met the certified bound after " + std::to_string(max_tries) + " tries" +
              (note.empty() ? "" : "; " + note);
  return best;
}

// Every try is evaluated; keeps the lowest exact TV (first index on ties).
inline Extractor best_extractor(const JointPmf& j, const BlockSupport& support, int ell, std::uint64_t seed,
                                int tries, double eps) {
  const int n = support.n();
  std::string note;
  const double bound = extractor_certificate(j, n, ell, eps, &note);
  const std::size_t chunk =
      std::max<std::size_t>(1, std::min<std::size_t>(16, (std::size_t{1} << 26) / std::max<std::size_t>(1, support.x_space())));
  Extractor best;
  for (int t0 = 0; t0 < tries; t0 += static_cast<int>(chunk)) {
    std::vector<Extractor> batch;
    for (int t = t0; t < tries && batch.size() < chunk; ++t)
      batch.push_back(draw_extractor(j.nx(), n, ell, seed, static_cast<std::uint64_t>(t)));
    auto tvs = extractor_tvs(support, batch);
    for (std::size_t i = 0; i < batch.size(); ++i)
      if ((t0 == 0 && i == 0) || tvs[i] < best.measured_tv) {
        best = std::move(batch[i]);
        best.measured_tv = tvs[i];
      }
  }
  best.certified_bound = bound;
  best.certified = bound < 1 && best.measured_tv <= bound;
  best.note = bound < 1 ? note : "certified bound is vacuous (>= 1)";
  return best;
}
}  // namespace detail

/// Searches seeded hash draws for one whose exact TV meets the leftover bound.
inline Extractor build_extractor(const JointPmf& j, int n, int ell, std::uint64_t seed, int max_tries = 64,
                                 double eps = 0.05) {
  if (n < 1) throw DomainError("block length must be at least 1");
  if (ell < 0) throw DomainError("ell must be nonnegative");
  if (max_tries < 1) throw DomainError("max_tries must be at least 1");
  const double width = n * std::log2(static_cast<double>(j.nx()));
  if (ell > width + 1e-12)
    throw DomainError("ell = " + std::to_string(ell) + " exceeds n log2|X| = " + std::to_string(width));
  if (std::pow(static_cast<double>(j.nx() * j.ny()), n) > kExtractorCap)
    throw CapExceeded("combinatorial blow-up: |X|^n |Y|^n exceeds the enumeration cap 2^22");
  return detail::search_extractor(j, BlockSupport(j, n, kExtractorCap), ell, seed, max_tries, eps);
}

// ---------------------------------------------------------------------------
// Source simulation by the interval algorithm.

/// Target: p1 on the first k1 = ceil(gamma L) coordinates, p2 on the rest.
struct SourceTarget {
  ProbVector p1, p2;
  double gamma = 1;
  int L = 1;

  int k1() const { return std::clamp(static_cast<int>(std::ceil(gamma * L - 1e-9)), 0, L); }
  const ProbVector& at(int t) const { return t < k1() ? p1 : p2; }
  double rate() const { return (k1() * entropy(p1) + (L - k1()) * entropy(p2)) / L; }
};

struct SimulatedLeaf {
  mpz_class first_atom;  // atoms [first_atom, first_atom + count) map here
  mpz_class count;
  std::vector<std::uint32_t> sequence;
  Rational target;
};

/// The map from input_bits uniform bits to A^L and its exact output law.
struct SourceSimulator {
  SourceTarget target;
  int input_bits = 0;
  std::vector<SimulatedLeaf> leaves;  // ordered by first_atom
  Rational measured_tv;

  std::size_t leaf_of(std::uint64_t atom) const {
    mpz_class a(static_cast<unsigned long>(atom));
    auto it = std::upper_bound(leaves.begin(), leaves.end(), a,
                               [](const mpz_class& v, const SimulatedLeaf& l) { return v < l.first_atom; });
    return static_cast<std::size_t>(it - leaves.begin()) - 1;
  }
  const std::vector<std::uint32_t>& operator()(std::uint64_t atom) const { return leaves[leaf_of(atom)].sequence; }
};

inline constexpr int kMaxInputBits = 22;

namespace detail {
// Number of atom midpoints (2u + 1) / 2^(B+1) below c.
inline mpz_class atoms_below(const Rational& c, int bits) {
  const mpz_class total = mpz_class(1) << bits;
  Rational scaled = c * Rational(total) - Rational(1, 2);
  mpz_class k = ceil_integer(scaled);
  if (k < 0) return 0;
  if (k > total) return total;
  return k;
}
}  // namespace detail

inline SourceSimulator build_source_simulator(const SourceTarget& target, int input_bits) {
  if (input_bits < 0 || input_bits > kMaxInputBits)
    throw CapExceeded("input_bits must lie in [0, " + std::to_string(kMaxInputBits) + "]");
  if (target.L < 1) throw DomainError("block length must be at least 1");
  if (target.gamma < 0 || target.gamma > 1) throw DomainError("gamma must lie in [0, 1]");
  if (target.p1.size() != target.p2.size()) throw DimensionError("p1 and p2 have different alphabets");
  SourceSimulator sim;
  sim.target = target;
  sim.input_bits = input_bits;
  const mpz_class total = mpz_class(1) << input_bits;
  std::vector<std::uint32_t> seq;
  std::function<void(const Rational&, const Rational&, const Rational&)> walk = [&](const Rational& lo,
                                                                                    const Rational& len,
                                                                                    const Rational& prob) {
    const mpz_class a = detail::atoms_below(lo, input_bits), b = detail::atoms_below(lo + len, input_bits);
    if (b <= a) return;
    const int t = static_cast<int>(seq.size());
    if (t == target.L) {
      sim.leaves.push_back({a, b - a, seq, prob});
      return;
    }
    const auto& p = target.at(t);
    Rational cur = lo;
    for (std::size_t s = 0; s < p.size(); ++s) {
      if (p[s] == 0) continue;
      const Rational sub = len * p[s];
      seq.push_back(static_cast<std::uint32_t>(s));
      walk(cur, sub, prob * p[s]);
      seq.pop_back();
      cur += sub;
    }
  };
  walk(Rational(0), Rational(1), Rational(1));
  Rational tv(0);
  for (const auto& l : sim.leaves) {
    Rational got(l.count, total);
    got.canonicalize();
    if (got > l.target) tv += got - l.target;
  }
  sim.measured_tv = tv;
  return sim;
}

/// phi(uniform_index): the sequence whose CDF interval holds the atom midpoint.
inline std::vector<std::uint32_t> simulate_source(const SourceSimulator& sim, std::uint64_t uniform_index) {
  if (uniform_index >= (std::uint64_t{1} << sim.input_bits)) throw DomainError("uniform index out of range");
  return sim(uniform_index);
}

// ---------------------------------------------------------------------------
// Block maps psi = phi o B.

struct BlockMap {
  int L = 0;
  int ell = 0;
  double target_rate = 0;
  double extraction_rate = 0;
  double h_cond = 0;
  bool deterministic = false;  // zero-rate target: no extraction needed
  Extractor extractor;
  SourceSimulator simulator;
  std::vector<std::uint32_t> psi;  // x^L index -> simulator leaf
  std::optional<double> measured_joint_tv;

  const std::vector<std::uint32_t>& operator()(std::size_t x_index) const {
    return simulator.leaves[psi.at(x_index)].sequence;
  }
};

inline constexpr double kBlockMapCap = 16777216.0;  // 2^24

/// Exact TV between p_{psi(X^L), Y^L} and p_{Y^L} x target.
inline double block_map_joint_tv(const JointPmf& j, const BlockMap& m, double cap = kBlockMapCap) {
  BlockSupport support(j, m.L, cap);
  const auto& leaves = m.simulator.leaves;
  std::vector<double> target(leaves.size()), hist(leaves.size(), 0.0);
  for (std::size_t i = 0; i < leaves.size(); ++i) target[i] = leaves[i].target.get_d();
  std::vector<std::uint32_t> touched;
  double tv = 0;
  support.for_each_y([&](double py, const std::vector<BlockSupport::Entry>& xs) {
    touched.clear();
    for (const auto& e : xs) {
      const auto leaf = m.psi[e.x];
      if (hist[leaf] == 0) touched.push_back(leaf);
      hist[leaf] += e.p;
    }
    for (auto leaf : touched) {
      tv += std::max(0.0, hist[leaf] - py * target[leaf]);
      hist[leaf] = 0;
    }
  });
  return std::min(1.0, tv);
}

/// Builds psi_L = phi_L o B_L at extraction rate R halfway between the target
/// rate and H(X|Y), with ell = floor(R L) extracted bits.
inline BlockMap compose_block_map(const JointPmf& j, int L, const ProbVector& p1, const ProbVector& p2, double gamma,
                                  double eps, std::uint64_t seed, bool measure_joint_tv = true,
                                  double cap = kBlockMapCap) {
  if (L < 1) throw DomainError("block length must be at least 1");
  SourceTarget target{p1, p2, gamma, L};
  BlockMap m;
  m.L = L;
  m.h_cond = conditional_entropy(j);
  m.target_rate = target.rate();
  m.deterministic = m.target_rate == 0;
  if (!m.deterministic && !(m.target_rate < m.h_cond))
    throw EntropyDeficit("entropy deficit: target rate " + std::to_string(m.target_rate) +
                         " must lie strictly below an extraction rate R, itself strictly below H(X|Y) = " +
                         std::to_string(m.h_cond) + " (midpoint R would be " +
                         std::to_string((m.target_rate + m.h_cond) / 2) + ")");
  m.extraction_rate = m.deterministic ? 0.0 : (m.target_rate + m.h_cond) / 2;
  m.ell = static_cast<int>(std::floor(m.extraction_rate * L + 1e-12));
  if (m.ell > kMaxInputBits)
    throw CapExceeded("combinatorial blow-up: " + std::to_string(m.ell) + " extracted bits exceed the cap " +
                      std::to_string(kMaxInputBits));
  const double xspace = std::pow(static_cast<double>(j.nx()), L);
  if (xspace > cap) throw CapExceeded("combinatorial blow-up: |X|^L exceeds " + std::to_string(cap));
  m.simulator = build_source_simulator(target, m.ell);
  if (m.ell == 0) {
    m.extractor.n = L;
    m.extractor.seed = seed;
    m.extractor.table.assign(static_cast<std::size_t>(xspace), 0);
    m.extractor.measured_tv = 0;
    m.extractor.certified_bound = 0;
    m.extractor.certified = true;
    m.extractor.note = "zero output bits";
  } else {
    // Enumerates the support only, so sparse sources reach longer blocks. All
    // 64 draws are scored and the lowest exact TV is kept.
    m.extractor = detail::best_extractor(j, BlockSupport(j, L, cap), m.ell, seed, 64, eps);
  }
  m.psi.resize(m.extractor.table.size());
  for (std::size_t x = 0; x < m.psi.size(); ++x)
    m.psi[x] = static_cast<std::uint32_t>(m.simulator.leaf_of(m.extractor.table[x]));
  if (measure_joint_tv) m.measured_joint_tv = block_map_joint_tv(j, m, cap);
  return m;
}

}  // namespace entropy_games
