#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "qit/error.hpp"

namespace qit {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace detail

// Deterministic seeded randomness. A draw is a pure function of
// (seed, stream_id, draw index): the engine is the standard-specified
// mt19937_64 and uniform doubles are produced by an explicit bit mapping,
// so sequences are bit-identical across platforms and runs. Substreams are
// derived without consuming parent state, which lets independent trials be
// replayed or partitioned across threads without changing any draw.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed),
        stream_id_(stream_id),
        engine_(detail::splitmix64(detail::splitmix64(seed) ^
                                   detail::splitmix64(~stream_id))) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0,1) with 53-bit resolution.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound), bias-free via rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) raise(errc::bad_value, "next_below needs a positive bound");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  // Standard normal via Box-Muller; two uniforms consumed per call.
  double next_gaussian() {
    const double u1 = 1.0 - next_uniform();  // (0,1], keeps log finite
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Derived stream; depends only on (seed, stream_id, child_id).
  RandomSource substream(std::uint64_t child_id) const {
    return RandomSource(seed_, detail::splitmix64(detail::splitmix64(stream_id_) + child_id));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace qit
