#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace sbp {

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent key from a parent key and a list of counters.
// Used to split one master seed into per-phase, per-sweep and per-node
// streams so that any evaluation order replays the same randomness.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t key = mix64(parent);
  for (auto step : path) key = mix64(key ^ mix64(step + 0x632be59bd9b4e019ULL));
  return key;
}

// Counter-based generator: the n-th output is a pure function of (key, n).
// Satisfies UniformRandomBitGenerator so it also drives std distributions.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  constexpr explicit CounterStream(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept { return mix64(key_ ^ mix64(++counter_)); }

  // Uniform on (0, 1]; never returns exactly 0 so `x <= p` rejects p = 0.
  constexpr double uniform() noexcept {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace sbp
