#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace lightsnn {

/// Sub-seed namespaces so that weights, data and search sampling never share
/// a stream.
enum class SeedPurpose : std::uint64_t {
  Weights = 0x5745494748545331ULL,
  Data = 0x4441544153455431ULL,
  Search = 0x5345415243483031ULL,
};

/// xoshiro256** seeded through splitmix64.
///
/// Every draw (including normal variates) is computed with integer arithmetic
/// plus a fixed Box-Muller transform, so a seed yields the same sequence on
/// every platform with an IEEE-754 libm.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal variate.
  double normal() noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Deterministically mixes `seed` with a sequence of keys. Used to give each
  /// weight tensor its own stream independent of construction order.
  static std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept;
  static std::uint64_t derive(std::uint64_t seed, SeedPurpose purpose) noexcept {
    return derive(seed, {static_cast<std::uint64_t>(purpose)});
  }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace lightsnn
