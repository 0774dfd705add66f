#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>

namespace lapwm {

/// Explicit seed for every stochastic operation. There is no global RNG state.
struct SeedToken {
  std::uint64_t value = 0;
  constexpr explicit SeedToken(std::uint64_t v = 0) : value(v) {}
  friend constexpr bool operator==(SeedToken, SeedToken) = default;
};

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Order-sensitive combination of several 64-bit words into one seed.
constexpr std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w));
  return h;
}

/// 64-bit FNV-1a over a byte string.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based generator: output i is mix64(key + i * golden). Stateless
/// apart from the counter, so streams are reproducible on every platform.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t next() noexcept {
    return mix64(key_ ^ (0xd1b54a32d192ed03ULL * ++counter_));
  }

  /// Uniform integer in [0, bound), bound > 0, by rejection (no modulo bias).
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % bound;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Uniform variate on the open interval (0, 1) from the top 52 bits. The
/// half-step offset keeps both endpoints out (k + 0.5 is exact below 2^52).
inline double open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// The engine used for Monte Carlo work. mt19937_64 output is fully
/// specified by the standard; distributions are built by hand on top of it.
using Engine = std::mt19937_64;

inline Engine make_engine(SeedToken seed) { return Engine(mix64(seed.value)); }

}  // namespace lapwm
