// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace rcl {

/// Seed used by the command-line driver when none is supplied.
inline constexpr std::uint64_t kDefaultSeed = 20190917;

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// A single random stream.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard, and
/// converts raw words to doubles and indices by hand so the drawn values do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n); n must be positive.
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

/// Deterministic derivation of independent substreams.
///
/// A factory is identified by a 64-bit key. fork() mixes a purpose string or an
/// integer into the key; stream(task) yields the generator for one task. Two
/// factories forked along the same path always produce the same streams.
class StreamFactory {
 public:
  explicit StreamFactory(std::uint64_t seed) : key_(splitmix64(seed)) {}

  [[nodiscard]] StreamFactory fork(std::string_view purpose) const;
  [[nodiscard]] StreamFactory fork(std::uint64_t index) const;
  [[nodiscard]] Rng stream(std::uint64_t task) const;
  [[nodiscard]] std::uint64_t key() const noexcept { return key_; }

 private:
  struct RawKey {};
  StreamFactory(RawKey, std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
};

}  // namespace rcl
