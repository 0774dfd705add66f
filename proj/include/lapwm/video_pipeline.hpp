#pragma once

// In-frame watermarking over a pool of high-frequency 4x4 DCT coefficients.
//
// The frame-wide pool lists, block by block in raster order, the coefficients
// at the pool's zig-zag positions: pool index p is block p / P, slot p % P.
// One keyed permutation of that pool is cut into disjoint groups of N, one
// group per payload bit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lapwm/dct4.hpp"
#include "lapwm/errors.hpp"
#include "lapwm/frame.hpp"
#include "lapwm/laplace_model.hpp"
#include "lapwm/watermark_codec.hpp"

namespace lapwm {

struct CoeffPool {
  std::vector<int> positions{10, 11, 12, 13, 14, 15};

  void validate() const {
    if (positions.empty()) throw ConfigError("coefficient pool is empty");
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (positions[i] < 1 || positions[i] > 15)
        throw ConfigError("pool positions must be zig-zag indices in [1, 15]");
      for (std::size_t j = 0; j < i; ++j)
        if (positions[j] == positions[i]) throw ConfigError("pool positions must be distinct");
    }
  }
  std::size_t per_block() const noexcept { return positions.size(); }
};

struct CoeffCoord {
  std::size_t block = 0;
  int zigzag = 0;
  friend bool operator==(const CoeffCoord&, const CoeffCoord&) = default;
};

/// Record of one embedding: enough to re-locate and verify every bit.
struct PayloadMap {
  EmbedConfig config;
  std::vector<int> positions;
  int width = 0;
  int height = 0;
  std::vector<Bit> bits;
  std::vector<std::vector<CoeffCoord>> groups;
};

inline std::size_t frame_capacity(std::size_t blocks, const CoeffPool& pool, std::size_t n) {
  if (n < 1) throw ConfigError("spread length N must be >= 1");
  return blocks * pool.per_block() / n;
}

/// Disjoint pool-index groups of size N for `bit_count` bits.
inline std::vector<std::vector<std::size_t>> bit_groups(const EmbedConfig& cfg,
                                                        std::size_t pool_size,
                                                        std::size_t bit_count) {
  cfg.validate();
  std::vector<std::vector<std::size_t>> groups;
  if (bit_count == 0) return groups;
  const std::size_t max_bits = pool_size / cfg.spread_n;
  if (bit_count > max_bits)
    throw CapacityError("payload of " + std::to_string(bit_count) +
                            " bits exceeds frame capacity of " + std::to_string(max_bits) +
                            " bits",
                        max_bits);
  const auto order = select_indices(cfg.key, pool_size, bit_count * cfg.spread_n);
  groups.reserve(bit_count);
  for (std::size_t b = 0; b < bit_count; ++b)
    groups.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(b * cfg.spread_n),
                        order.begin() + static_cast<std::ptrdiff_t>((b + 1) * cfg.spread_n));
  return groups;
}

inline Block4 read_block(const FramePlane& frame, std::size_t block) {
  const int bx = static_cast<int>(block % static_cast<std::size_t>(frame.blocks_x())) * 4;
  const int by = static_cast<int>(block / static_cast<std::size_t>(frame.blocks_x())) * 4;
  Block4 b{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) b[r * 4 + c] = frame.at(bx + c, by + r);
  return b;
}

/// Pool coefficients of a frame, in pool order.
inline std::vector<double> pool_coefficients(const FramePlane& frame, const CoeffPool& pool) {
  pool.validate();
  std::vector<double> out;
  out.reserve(frame.block_count() * pool.per_block());
  for (std::size_t blk = 0; blk < frame.block_count(); ++blk) {
    const Block4 coeffs = fdct4(read_block(frame, blk));
    for (int pos : pool.positions) out.push_back(coeffs[kZigZag4[pos]]);
  }
  return out;
}

/// Applies the +/-a shifts in place on a pool-ordered coefficient vector.
inline std::vector<std::vector<std::size_t>> embed_coefficients(std::span<double> pool_values,
                                                                std::span<const Bit> bits,
                                                                const EmbedConfig& cfg) {
  auto groups = bit_groups(cfg, pool_values.size(), bits.size());
  for (std::size_t b = 0; b < bits.size(); ++b) {
    const double shift = bits[b] == Bit::One ? cfg.strength_a : -cfg.strength_a;
    for (std::size_t idx : groups[b]) pool_values[idx] += shift;
  }
  return groups;
}

inline std::vector<Bit> extract_coefficients(std::span<const double> pool_values,
                                             const std::vector<std::vector<std::size_t>>& groups,
                                             const DecoderParams& decoder, DecoderKind kind) {
  std::vector<Bit> bits;
  bits.reserve(groups.size());
  std::vector<double> y;
  if (kind == DecoderKind::Optimum) {
    const LlrEvaluator llr(decoder);
    for (const auto& g : groups) {
      y.clear();
      for (std::size_t idx : g) y.push_back(pool_values[idx]);
      bits.push_back(decode_optimum(y, llr));
    }
  } else {
    for (const auto& g : groups) {
      y.clear();
      for (std::size_t idx : g) y.push_back(pool_values[idx]);
      bits.push_back(decode_suboptimum(y, decoder.strength_a));
    }
  }
  return bits;
}

/// Watermarked luma before rounding, as real-valued pixels (row-major).
struct RealFrame {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;
};

inline std::pair<RealFrame, PayloadMap> embed_frame_real(const FramePlane& frame,
                                                         std::span<const Bit> bits,
                                                         const EmbedConfig& cfg,
                                                         const CoeffPool& pool) {
  pool.validate();
  cfg.validate();
  const std::size_t per_block = pool.per_block();
  const std::size_t pool_size = frame.block_count() * per_block;
  const auto groups = bit_groups(cfg, pool_size, bits.size());

  RealFrame out{frame.width(), frame.height(),
                std::vector<double>(frame.samples().begin(), frame.samples().end())};
  PayloadMap map{cfg, pool.positions, frame.width(), frame.height(),
                 std::vector<Bit>(bits.begin(), bits.end()), {}};

  // Per-block deltas, indexed by pool slot.
  std::vector<double> delta(pool_size, 0.0);
  std::vector<char> touched(frame.block_count(), 0);
  map.groups.reserve(groups.size());
  for (std::size_t b = 0; b < groups.size(); ++b) {
    const double shift = bits[b] == Bit::One ? cfg.strength_a : -cfg.strength_a;
    std::vector<CoeffCoord> coords;
    coords.reserve(groups[b].size());
    for (std::size_t idx : groups[b]) {
      delta[idx] += shift;
      touched[idx / per_block] = 1;
      coords.push_back({idx / per_block, pool.positions[idx % per_block]});
    }
    map.groups.push_back(std::move(coords));
  }

  const int bw = frame.blocks_x();
  for (std::size_t blk = 0; blk < frame.block_count(); ++blk) {
    if (!touched[blk]) continue;
    Block4 coeffs = fdct4(read_block(frame, blk));
    for (std::size_t s = 0; s < per_block; ++s)
      coeffs[kZigZag4[pool.positions[s]]] += delta[blk * per_block + s];
    const Block4 px = idct4(coeffs);
    const int bx = static_cast<int>(blk % static_cast<std::size_t>(bw)) * 4;
    const int by = static_cast<int>(blk / static_cast<std::size_t>(bw)) * 4;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        out.pixels[static_cast<std::size_t>(by + r) * static_cast<std::size_t>(frame.width()) +
                   static_cast<std::size_t>(bx + c)] = px[r * 4 + c];
  }
  return {std::move(out), std::move(map)};
}

/// Nearest-integer rounding, then clipping to [0, 255].
inline FramePlane quantize(const RealFrame& real) {
  std::vector<std::uint8_t> samples(real.pixels.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    samples[i] = static_cast<std::uint8_t>(std::clamp(std::nearbyint(real.pixels[i]), 0.0, 255.0));
  return FramePlane(real.width, real.height, std::move(samples));
}

inline std::pair<FramePlane, PayloadMap> embed_frame(const FramePlane& frame,
                                                     std::span<const Bit> bits,
                                                     const EmbedConfig& cfg,
                                                     const CoeffPool& pool = {}) {
  auto [real, map] = embed_frame_real(frame, bits, cfg, pool);
  return {quantize(real), std::move(map)};
}

/// Decodes with the group layout recorded in `map`.
inline std::vector<Bit> extract_frame(const FramePlane& frame, const PayloadMap& map,
                                      const DecoderParams& decoder, DecoderKind kind) {
  if (frame.width() != map.width || frame.height() != map.height)
    throw FormatError("frame is " + std::to_string(frame.width()) + "x" +
                      std::to_string(frame.height()) + " but the payload map expects " +
                      std::to_string(map.width) + "x" + std::to_string(map.height));
  const CoeffPool pool{map.positions};
  pool.validate();
  const auto values = pool_coefficients(frame, pool);
  std::vector<int> slot_of(16, -1);
  for (std::size_t s = 0; s < pool.positions.size(); ++s)
    slot_of[static_cast<std::size_t>(pool.positions[s])] = static_cast<int>(s);
  std::vector<std::vector<std::size_t>> groups;
  groups.reserve(map.groups.size());
  for (const auto& coords : map.groups) {
    std::vector<std::size_t> g;
    g.reserve(coords.size());
    for (const CoeffCoord& c : coords) {
      if (c.block >= frame.block_count() || c.zigzag < 0 || c.zigzag > 15 ||
          slot_of[static_cast<std::size_t>(c.zigzag)] < 0)
        throw FormatError("payload map coordinate outside the frame pool");
      g.push_back(c.block * pool.per_block() +
                  static_cast<std::size_t>(slot_of[static_cast<std::size_t>(c.zigzag)]));
    }
    groups.push_back(std::move(g));
  }
  return extract_coefficients(values, groups, decoder, kind);
}

/// Decodes by recomputing the keyed layout from the embedding configuration.
inline std::vector<Bit> extract_frame(const FramePlane& frame, const EmbedConfig& cfg,
                                      const CoeffPool& pool, std::size_t bit_count,
                                      const DecoderParams& decoder, DecoderKind kind) {
  const auto values = pool_coefficients(frame, pool);
  return extract_coefficients(values, bit_groups(cfg, values.size(), bit_count), decoder, kind);
}

/// Returned by psnr / predicted_psnr when there is no distortion.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

inline double psnr(const FramePlane& reference, const FramePlane& test) {
  if (reference.width() != test.width() || reference.height() != test.height())
    throw FormatError("PSNR needs frames of equal dimensions");
  double sse = 0.0;
  const auto& a = reference.samples();
  const auto& b = test.samples();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sse += d * d;
  }
  if (sse == 0.0) return kPsnrIdentical;
  const double mse = sse / static_cast<double>(a.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

/// PSNR implied by an orthonormal transform: MSE = bits * N * a^2 / pixels.
inline double predicted_psnr(const EmbedConfig& cfg, std::size_t bits, std::size_t frame_pixels) {
  if (frame_pixels == 0) throw ConfigError("frame must have pixels");
  if (bits == 0) return kPsnrIdentical;
  const double mse = static_cast<double>(bits) * static_cast<double>(cfg.spread_n) *
                     cfg.strength_a * cfg.strength_a / static_cast<double>(frame_pixels);
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace lapwm
