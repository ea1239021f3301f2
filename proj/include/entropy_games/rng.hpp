#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

namespace entropy_games {

/// Counter-based generator "splitmix64-ctr/1".
///
/// Output i of stream s under seed k is
///   key  = mix(k ^ mix(s + 0x9e3779b97f4a7c15))
///   x_i  = mix(key + (i + 1) * 0x9e3779b97f4a7c15)
/// where mix is the SplitMix64 finalizer. Streams are named by 64-bit ids;
/// string names map to ids through FNV-1a. Doubles are (x >> 11) * 2^-53.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  static constexpr std::string_view kName = "splitmix64-ctr/1";
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t stream_id(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream), key_(mix(seed ^ mix(stream + kGolden))) {}
  constexpr CounterRng(std::uint64_t seed, std::string_view stream) : CounterRng(seed, stream_id(stream)) {}

  // Independent child stream, e.g. per try or per restart.
  constexpr CounterRng child(std::uint64_t index) const { return CounterRng(seed_, mix(stream_ ^ mix(index + 1))); }

  constexpr std::uint64_t at(std::uint64_t counter) const { return mix(key_ + (counter + 1) * kGolden); }

  std::uint64_t operator()() { return at(counter_++); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return std::numeric_limits<std::uint64_t>::max(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), unbiased by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do x = (*this)();
    while (x >= limit);
    return x % n;
  }

  // Standard exponential via inversion.
  double exponential() { return -std::log1p(-uniform()); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace entropy_games
