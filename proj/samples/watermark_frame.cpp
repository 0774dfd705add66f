// Embeds a random payload into a synthetic QCIF frame and reads it back.

#include <cmath>
#include <cstdio>
#include <vector>

#include "lapwm/lapwm.hpp"

int main() {
  using namespace lapwm;
  FramePlane frame(176, 144);
  for (int y = 0; y < frame.height(); ++y)
    for (int x = 0; x < frame.width(); ++x)
      frame.at(x, y) = static_cast<std::uint8_t>(
          128 + 60 * std::sin(x * 0.07) * std::cos(y * 0.05) + 10 * std::sin(x * y * 0.01));

  const EmbedConfig cfg{4.0, 120, "sample-key"};
  const CoeffPool pool;
  const std::size_t capacity = frame_capacity(frame.block_count(), pool, cfg.spread_n);

  Engine eng = make_engine(SeedToken(3));
  std::vector<Bit> bits;
  for (std::size_t i = 0; i < capacity; ++i) bits.push_back((eng() >> 63) ? Bit::One : Bit::Zero);

  const auto [marked, map] = embed_frame(frame, bits, cfg, pool);
  const double lambda1 = estimate_laplace(pool_coefficients(marked, pool)).scale();
  const auto decoded = extract_frame(marked, map, DecoderParams{lambda1, 0.1, cfg.strength_a},
                                     DecoderKind::Optimum);

  std::size_t errors = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) errors += decoded[i] != bits[i];
  std::printf("capacity %zu bits, errors %zu, PSNR %.2f dB (predicted %.2f dB)\n", capacity, errors,
              psnr(frame, marked), predicted_psnr(cfg, bits.size(), frame.pixel_count()));
}
