#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "entropy_games/game.hpp"
#include "entropy_games/rng.hpp"

namespace entropy_games::testing {

inline PayoffMatrix mat(const std::vector<std::vector<std::string>>& rows) { return validate_game(rows); }

inline PayoffMatrix matching_pennies() { return mat({{"1", "0"}, {"0", "1"}}); }
inline PayoffMatrix example_3x3() { return mat({{"-1", "1", "1"}, {"1", "0.5", "1"}, {"1", "1", "0.5"}}); }

inline Rational q(const char* s) { return parse_rational(s); }

// Random integer game with entries in [lo, hi].
inline PayoffMatrix random_game(CounterRng& rng, std::size_t n, std::size_t m, int lo = -5, int hi = 5) {
  std::vector<RationalVector> rows(n, RationalVector(m));
  for (auto& r : rows)
    for (auto& u : r) u = lo + static_cast<long>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
  return PayoffMatrix(std::move(rows));
}

// Random rational point of the simplex with denominators dividing `den`.
inline ProbVector random_simplex_point(CounterRng& rng, std::size_t n, unsigned den = 60) {
  std::vector<unsigned> cuts{0, den};
  for (std::size_t i = 0; i + 1 < n; ++i) cuts.push_back(static_cast<unsigned>(rng.below(den + 1)));
  std::sort(cuts.begin(), cuts.end());
  RationalVector p;
  for (std::size_t i = 0; i < n; ++i) p.emplace_back(static_cast<long>(cuts[i + 1] - cuts[i]), static_cast<long>(den));
  for (auto& x : p) x.canonicalize();
  return ProbVector(p);
}

inline std::vector<double> random_pmf(CounterRng& rng, std::size_t n) {
  std::vector<double> p(n);
  double s = 0;
  for (auto& x : p) s += (x = rng.exponential());
  for (auto& x : p) x /= s;
  return p;
}

}  // namespace entropy_games::testing
