#pragma once

// Additive +/-a embedding over N keyed coefficients and the two bit decoders:
// the exact log-likelihood-ratio (optimum) test and the clamped-sum
// (sub-optimum) test. Both decide bit 1 on a tie.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lapwm/errors.hpp"
#include "lapwm/laplace_model.hpp"
#include "lapwm/random.hpp"

namespace lapwm {

enum class Bit : std::uint8_t { Zero = 0, One = 1 };

constexpr Bit to_bit(int v) noexcept { return v != 0 ? Bit::One : Bit::Zero; }
constexpr int to_int(Bit b) noexcept { return static_cast<int>(b); }
constexpr Bit flip(Bit b) noexcept { return b == Bit::One ? Bit::Zero : Bit::One; }

struct EmbedConfig {
  double strength_a = 1.0;
  std::size_t spread_n = 1;
  std::string key;

  void validate() const {
    if (!(strength_a > 0.0) || !std::isfinite(strength_a))
      throw ConfigError("strength a must be > 0");
    if (spread_n < 1) throw ConfigError("spread length N must be >= 1");
  }
};

struct DecoderParams {
  double host_scale = 1.0;
  double g = 1.0;
  double strength_a = 1.0;

  void validate() const {
    if (!(host_scale > 0.0) || !(g > 0.0) || !(strength_a > 0.0))
      throw ConfigError("decoder parameters must all be > 0");
  }
  double noise_scale() const noexcept { return g * host_scale; }
  /// Scale of the slower-decaying exponential in the host+noise density.
  double slow_scale() const noexcept { return std::max(host_scale, noise_scale()); }
};

// ---------------------------------------------------------------------------
// Keyed coefficient selection

/// Seed for select_indices: FNV-1a of the key mixed with pool size and count.
inline std::uint64_t selection_seed(std::string_view key, std::size_t pool_size, std::size_t n) {
  return hash_words({fnv1a64(key), static_cast<std::uint64_t>(pool_size),
                     static_cast<std::uint64_t>(n)});
}

/// n distinct indices in [0, pool_size): the first n slots of a partial
/// Fisher-Yates shuffle driven by CounterRng(selection_seed(key, pool_size, n)).
inline std::vector<std::size_t> select_indices(std::string_view key, std::size_t pool_size,
                                               std::size_t n) {
  if (n < 1) throw ConfigError("must select at least one index");
  if (n > pool_size)
    throw CapacityError("cannot select " + std::to_string(n) + " indices from a pool of " +
                            std::to_string(pool_size),
                        pool_size);
  std::vector<std::size_t> perm(pool_size);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  CounterRng rng(selection_seed(key, pool_size, n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool_size - i));
    std::swap(perm[i], perm[j]);
  }
  perm.resize(n);
  return perm;
}

// ---------------------------------------------------------------------------
// Embedding

inline void embed_bit_inplace(std::span<double> coeffs, Bit bit, double a) noexcept {
  const double shift = bit == Bit::One ? a : -a;
  for (double& c : coeffs) c += shift;
}

inline std::vector<double> embed_bit(std::span<const double> coeffs, Bit bit, double a) {
  std::vector<double> out(coeffs.begin(), coeffs.end());
  embed_bit_inplace(out, bit, a);
  return out;
}

// ---------------------------------------------------------------------------
// Per-sample statistics

/// l(y, a): y clipped to [-a, a]. Equals (|y + a| - |y - a|) / 2.
constexpr double clamp_stat(double y, double a) noexcept {
  return y > a ? a : (y < -a ? -a : y);
}

/// Precomputed optimum-decoder state: the host+noise density law and a.
class LlrEvaluator {
 public:
  explicit LlrEvaluator(const DecoderParams& p)
      : law_((p.validate(), p.host_scale), p.noise_scale()), a_(p.strength_a) {}

  /// ln f(y - a) - ln f(y + a).
  double operator()(double y) const noexcept { return law_.log_pdf(y - a_) - law_.log_pdf(y + a_); }

  const LaplaceSum& law() const noexcept { return law_; }
  double strength() const noexcept { return a_; }

 private:
  LaplaceSum law_;
  double a_;
};

inline double llr_sample(double y, const DecoderParams& p) { return LlrEvaluator(p)(y); }

/// h(y): the non-clamp part of the scaled log-likelihood ratio,
/// (b_max / 2) * llr(y) - l(y, a), with b_max = max(host_scale, g * host_scale).
/// Summing clamp_stat + correction_term reproduces (b_max / 2) * LLR.
inline double correction_term(double y, const DecoderParams& p) {
  return 0.5 * p.slow_scale() * llr_sample(y, p) - clamp_stat(y, p.strength_a);
}

// ---------------------------------------------------------------------------
// Decoders

inline Bit decode_optimum(std::span<const double> y, const LlrEvaluator& llr) {
  double sum = 0.0;
  for (double v : y) sum += llr(v);
  return sum >= 0.0 ? Bit::One : Bit::Zero;
}

inline Bit decode_optimum(std::span<const double> y, const DecoderParams& p) {
  if (y.empty()) throw ConfigError("cannot decode an empty observation");
  return decode_optimum(y, LlrEvaluator(p));
}

/// Z = sum of clamp_stat(y_i, a). Saturated samples are counted as integers so
/// that a balanced set of +/-a saturations sums to exactly zero.
inline double clamped_sum(std::span<const double> y, double a) noexcept {
  std::int64_t saturation = 0;
  double linear = 0.0;
  for (double v : y) {
    if (v > a) {
      ++saturation;
    } else if (v < -a) {
      --saturation;
    } else {
      linear += v;
    }
  }
  return static_cast<double>(saturation) * a + linear;
}

inline Bit decode_suboptimum(std::span<const double> y, double a) {
  if (y.empty()) throw ConfigError("cannot decode an empty observation");
  if (!(a > 0.0)) throw ConfigError("strength a must be > 0");
  return clamped_sum(y, a) >= 0.0 ? Bit::One : Bit::Zero;
}

enum class DecoderKind { Optimum, Suboptimum };

inline std::string_view to_string(DecoderKind k) noexcept {
  return k == DecoderKind::Optimum ? "optimum" : "suboptimum";
}

}  // namespace lapwm
