// SPDX-License-Identifier: Apache-2.0
#include "rcl/random.hpp"

namespace rcl {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::size_t Rng::index(std::size_t n) {
  // Rejection sampling removes the modulo bias.
  const auto bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = max() - (max() % bound + 1) % bound;
  std::uint64_t r = engine_();
  while (r > limit) r = engine_();
  return static_cast<std::size_t>(r % bound);
}

StreamFactory StreamFactory::fork(std::string_view purpose) const {
  return {RawKey{}, splitmix64(key_ ^ fnv1a64(purpose))};
}

StreamFactory StreamFactory::fork(std::uint64_t index) const {
  return {RawKey{}, splitmix64(key_ + splitmix64(index ^ 0x5851f42d4c957f2dULL))};
}

Rng StreamFactory::stream(std::uint64_t task) const {
  return Rng(splitmix64(key_ ^ splitmix64(task + 0x2545f4914f6cdd1dULL)));
}

}  // namespace rcl
