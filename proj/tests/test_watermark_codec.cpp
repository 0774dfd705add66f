#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "lapwm/watermark_codec.hpp"

using namespace lapwm;

namespace {

// ln f(y) for the host+noise density, in long double straight from the
// two-exponential form (no factoring).
long double direct_log_density(long double y, long double bh, long double bn) {
  const long double u = std::fabs(y);
  return std::log((bn * std::exp(-u / bn) - bh * std::exp(-u / bh)) / (2.0L * (bn * bn - bh * bh)));
}

}  // namespace

TEST(SelectIndices, ExhaustivePoolIsAPermutation) {
  auto idx = select_indices("K", 16, 16);
  std::sort(idx.begin(), idx.end());
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(idx[i], i);
}

TEST(SelectIndices, Deterministic) {
  EXPECT_EQ(select_indices("secret", 1000, 50), select_indices("secret", 1000, 50));
  EXPECT_NE(select_indices("secret", 1000, 50), select_indices("Secret", 1000, 50));
}

TEST(SelectIndices, DistinctAndInRange) {
  const auto idx = select_indices("K", 10'000, 120);
  ASSERT_EQ(idx.size(), 120u);
  EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), 120u);
  for (std::size_t i : idx) EXPECT_LT(i, 10'000u);
}

TEST(SelectIndices, RandomShapes) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t pool = 1 + rng() % 500;
    const std::size_t n = 1 + rng() % pool;
    const std::string key = std::to_string(rng());
    const auto idx = select_indices(key, pool, n);
    ASSERT_EQ(idx.size(), n);
    ASSERT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), n);
    ASSERT_LT(*std::max_element(idx.begin(), idx.end()), pool);
  }
}

TEST(SelectIndices, CapacityError) {
  EXPECT_THROW(select_indices("K", 10, 11), CapacityError);
  EXPECT_THROW(select_indices("K", 10, 0), ConfigError);
}

TEST(SelectIndices, RoughlyUniformFirstSlot) {
  // The first slot over many keys should hit each of 8 values about equally.
  std::array<int, 8> hits{};
  const int keys = 8000;
  for (int k = 0; k < keys; ++k) ++hits[select_indices("k" + std::to_string(k), 8, 3)[0]];
  for (int h : hits) EXPECT_NEAR(h, keys / 8, 5 * std::sqrt(keys / 8.0));
}

TEST(EmbedBit, Examples) {
  const std::vector<double> v{3, -1, 2};
  EXPECT_EQ(embed_bit(v, Bit::One, 1.0), (std::vector<double>{4, 0, 3}));
  EXPECT_EQ(embed_bit(v, Bit::Zero, 1.0), (std::vector<double>{2, -2, 1}));
  EXPECT_EQ(embed_bit(v, Bit::One, 0.0), v);
  EXPECT_EQ(embed_bit(v, Bit::Zero, 0.0), v);
}

TEST(ClampStat, Examples) {
  EXPECT_EQ(clamp_stat(5.0, 1.0), 1.0);
  EXPECT_EQ(clamp_stat(0.3, 1.0), 0.3);
  EXPECT_EQ(clamp_stat(-7.0, 2.0), -2.0);
  EXPECT_EQ(clamp_stat(1.0, 1.0), 1.0);
  EXPECT_EQ(clamp_stat(-1.0, 1.0), -1.0);
}

TEST(ClampStat, AbsoluteValueIdentityExactOnDyadicGrid) {
  // With y, a on a 2^-16 grid every operation in (|y + a| - |y - a|) / 2 is exact.
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<std::int64_t> ky(-(1 << 24), 1 << 24), ka(1, 1 << 22);
  for (int i = 0; i < 1'000'000; ++i) {
    const double y = std::ldexp(static_cast<double>(ky(rng)), -16);
    const double a = std::ldexp(static_cast<double>(ka(rng)), -16);
    ASSERT_EQ(clamp_stat(y, a), (std::abs(y + a) - std::abs(y - a)) / 2.0) << y << ' ' << a;
  }
}

TEST(ClampStat, AbsoluteValueIdentity) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ay(-20.0, 20.0), aa(1e-3, 10.0);
  for (int i = 0; i < 100'000; ++i) {
    const double y = ay(rng), a = aa(rng);
    const double expect = (std::abs(y + a) - std::abs(y - a)) / 2.0;
    ASSERT_NEAR(clamp_stat(y, a), expect, 4 * std::numeric_limits<double>::epsilon() * (std::abs(y) + a));
  }
}

TEST(LlrSample, ZeroAndOddSymmetry) {
  const DecoderParams p{1.3, 0.4, 0.7};
  EXPECT_EQ(llr_sample(0.0, p), 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int i = 0; i < 1000; ++i) {
    const double y = u(rng);
    EXPECT_NEAR(llr_sample(-y, p), -llr_sample(y, p), 1e-12);
  }
}

TEST(LlrSample, MatchesDirectDensityRatio) {
  const DecoderParams p{1.0, 0.5, 1.0};
  const long double ref = direct_log_density(2.0L, 1.0L, 0.5L) - direct_log_density(4.0L, 1.0L, 0.5L);
  EXPECT_NEAR(llr_sample(3.0, p), static_cast<double>(ref), 1e-9);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> uy(-8.0, 8.0), ug(0.2, 5.0), ua(0.1, 3.0);
  for (int i = 0; i < 500; ++i) {
    const double y = uy(rng), g = ug(rng), a = ua(rng);
    if (std::abs(g - 1.0) < 1e-3) continue;
    const DecoderParams q{1.0, g, a};
    const long double r = direct_log_density(y - a, 1.0L, g) - direct_log_density(y + a, 1.0L, g);
    EXPECT_NEAR(llr_sample(y, q), static_cast<double>(r), 1e-9) << y << ' ' << g << ' ' << a;
  }
}

TEST(LlrSample, EqualScalesUseTheLimitLaw) {
  const DecoderParams p{2.0, 1.0, 0.5};
  // f(y) = e^{-|y|/b}(1 + |y|/b) / (4b)
  auto logf = [](double y) { return -std::abs(y) / 2.0 + std::log1p(std::abs(y) / 2.0); };
  for (double y : {0.1, 0.6, 3.0, -9.0})
    EXPECT_NEAR(llr_sample(y, p), logf(y - 0.5) - logf(y + 0.5), 1e-12);
}

TEST(LlrSample, FiniteFarOutside) {
  for (double g : {0.1, 1.0, 3.0}) {
    const DecoderParams p{1.0, g, 1.0};
    for (double y : {-1000.0 * std::max(1.0, g), -50.0, 50.0, 1000.0 * std::max(1.0, g)}) {
      const double v = llr_sample(y, p);
      EXPECT_TRUE(std::isfinite(v)) << g << ' ' << y;
    }
    // Tends to 2a / b_max far from the origin; equal scales keep a slowly
    // vanishing log((1 + (y-a)/b) / (1 + (y+a)/b)) term.
    const double y = 1000.0 * std::max(1.0, g);
    const double b = p.slow_scale();
    const double limit = g == 1.0 ? 2.0 / b + std::log((1 + (y - 1) / b) / (1 + (y + 1) / b)) : 2.0 / b;
    EXPECT_NEAR(llr_sample(y, p), limit, 1e-9);
  }
}

TEST(CorrectionTerm, ZeroAndOdd) {
  const DecoderParams p{1.0, 0.3, 0.8};
  EXPECT_EQ(correction_term(0.0, p), 0.0);
  for (double y : {0.05, 0.5, 1.7, 6.0, 40.0})
    EXPECT_NEAR(correction_term(-y, p), -correction_term(y, p), 1e-12);
}

TEST(CorrectionTerm, SplitHasTheSignOfTheLikelihoodRatio) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ug(0.2, 5.0), ua(0.1, 2.0);
  int mismatches = 0;
  for (int v = 0; v < 10'000; ++v) {
    const DecoderParams p{1.0, ug(rng), ua(rng)};
    const LaplaceParams host(0.0, 1.0);
    Engine eng(rng());
    double split = 0.0, llr = 0.0;
    for (int i = 0; i < 12; ++i) {
      const double y = laplace_draw(eng, host) + laplace_draw(eng, LaplaceParams(0.0, p.noise_scale()));
      split += clamp_stat(y, p.strength_a) + correction_term(y, p);
      llr += llr_sample(y, p);
    }
    if (std::abs(llr) > 1e-9 && (split > 0) != (llr > 0)) ++mismatches;
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(DecodeOptimum, Examples) {
  const DecoderParams p{1.0, 0.1, 10.0};
  const std::vector<double> zeros(8, 0.0);
  EXPECT_EQ(decode_optimum(embed_bit(zeros, Bit::One, 10.0), p), Bit::One);
  EXPECT_EQ(decode_optimum(embed_bit(zeros, Bit::Zero, 10.0), p), Bit::Zero);
  EXPECT_EQ(decode_optimum(zeros, p), Bit::One);
  EXPECT_THROW(decode_optimum(std::vector<double>{}, p), ConfigError);
  EXPECT_THROW(decode_optimum(zeros, DecoderParams{0.0, 1.0, 1.0}), ConfigError);
}

TEST(DecodeSuboptimum, Examples) {
  EXPECT_EQ(decode_suboptimum(std::vector<double>{0.5, 0.5, -0.2}, 1.0), Bit::One);
  EXPECT_EQ(decode_suboptimum(std::vector<double>{-5, 0.1}, 1.0), Bit::Zero);
  EXPECT_NEAR(clamped_sum(std::vector<double>{-5, 0.1}, 1.0), -0.9, 1e-15);
  EXPECT_EQ(decode_suboptimum(embed_bit(std::vector<double>(6, 0.0), Bit::Zero, 0.3), 0.3), Bit::Zero);
  // Balanced saturations are an exact tie, decided as 1.
  EXPECT_EQ(clamped_sum(std::vector<double>{0.7, -0.9, 5, -5}, 0.3), 0.0);
  EXPECT_EQ(decode_suboptimum(std::vector<double>{0.7, -0.9, 5, -5}, 0.3), Bit::One);
  EXPECT_THROW(decode_suboptimum(std::vector<double>{}, 1.0), ConfigError);
}

TEST(Decoders, NegationFlipsDecisionExceptAtTies) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd(0.0, 2.0);
  const DecoderParams p{1.0, 0.6, 0.9};
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> y(9), neg(9);
    for (int i = 0; i < 9; ++i) {
      y[i] = nd(rng);
      neg[i] = -y[i];
    }
    double llr = 0.0;
    for (double v : y) llr += llr_sample(v, p);
    if (llr != 0.0) EXPECT_NE(decode_optimum(y, p), decode_optimum(neg, p));
    if (clamped_sum(y, 0.9) != 0.0) EXPECT_NE(decode_suboptimum(y, 0.9), decode_suboptimum(neg, 0.9));
  }
}

TEST(Decoders, SaturationRegimeRoundTrip) {
  // a >= 6 (lambda1 + g lambda1): errors need x + n beyond 6 scales on most samples.
  const double lambda1 = 1.0, g = 0.5, a = 9.0;
  const DecoderParams p{lambda1, g, a};
  const LlrEvaluator llr(p);
  Engine eng(99);
  const LaplaceParams host(0.0, lambda1), noise(0.0, g * lambda1);
  int opt_errors = 0, sub_errors = 0;
  const int trials = 100'000;
  std::vector<double> y(4);
  for (int t = 0; t < trials; ++t) {
    const Bit bit = (eng() & 1) ? Bit::One : Bit::Zero;
    for (double& v : y) v = laplace_draw(eng, host) + laplace_draw(eng, noise);
    embed_bit_inplace(y, bit, a);
    opt_errors += decode_optimum(y, llr) != bit;
    sub_errors += decode_suboptimum(y, a) != bit;
  }
  EXPECT_LT(opt_errors, trials * 1e-4);
  EXPECT_LT(sub_errors, trials * 1e-4);
}
