#pragma once

#include <cstdint>

#include "mevsim/numeric.hpp"

namespace mevsim {

/// Counter-based generator: output i depends only on (seed, stream_id, i),
/// never on platform or scheduling, so streams can be handed to parallel
/// workers and the merged results stay reproducible.
///
/// The core step is the SplitMix64 finalizer over a keyed counter.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id), key_(derive_key(seed, stream_id)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() {
    std::uint64_t z = key_ + (++counter_) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double next_unit_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Exact uniform rational k / 2^64, k in [0, 2^64).
  Rational next_unit_rational() {
    return Rational(BigInt(next_u64()), BigInt(1) << 64);
  }

  /// Bernoulli(p) with an exact rational comparison.
  bool bernoulli(const Rational& p) {
    if (p <= 0) {
      next_u64();
      return false;
    }
    if (p >= 1) {
      next_u64();
      return true;
    }
    return next_unit_rational() < p;
  }

  /// Unbiased integer in [0, n), Lemire's multiply-shift with rejection.
  std::uint64_t uniform_below(std::uint64_t n);

  /// Independent stream derived from this one's identity; does not consume
  /// any output from the parent.
  SeededRng split(std::uint64_t child) const {
    return SeededRng(seed_, mix(stream_id_ ^ mix(child + 0x632BE59BD9B4E019ull)));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream_id) {
    return mix(seed) ^ mix(mix(stream_id) + 0xD1B54A32D192ED03ull);
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_{0};
};

/// One Binomial(n, p) draw. Uses a Bernoulli sum for small n, geometric
/// skips for sparse tails, and the BTRS transformed-rejection sampler for
/// n*min(p,1-p) >= 10, so large populations cost O(1) per draw.
std::uint64_t binomial_draw(SeededRng& rng, std::uint64_t n, double p);

}  // namespace mevsim
