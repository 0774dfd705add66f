#pragma once

// Laplace / generalized-Gaussian densities, sampling, the density of the sum
// of two independent zero-mean Laplace variables, and ML estimation.
//
// Every Laplace law here is parametrized by its SCALE b:
//   f(x) = exp(-|x - m| / b) / (2 b),   Var = 2 b^2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "lapwm/errors.hpp"
#include "lapwm/random.hpp"

namespace lapwm {

class LaplaceParams {
 public:
  LaplaceParams(double location, double scale) : location_(location), scale_(scale) {
    if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(location))
      throw ConfigError("Laplace scale must be finite and > 0");
  }

  double location() const noexcept { return location_; }
  double scale() const noexcept { return scale_; }
  double variance() const noexcept { return 2.0 * scale_ * scale_; }

 private:
  double location_;
  double scale_;
};

/// Generalized Gaussian: f(x) = A exp(-|beta (x - m)|^c).
class GgdParams {
 public:
  GgdParams(double mean, double std_dev, double shape)
      : mean_(mean), std_dev_(std_dev), shape_(shape) {
    if (!(std_dev > 0.0) || !(shape > 0.0))
      throw ConfigError("GGD std_dev and shape must be > 0");
  }

  double mean() const noexcept { return mean_; }
  double std_dev() const noexcept { return std_dev_; }
  double shape() const noexcept { return shape_; }

  double beta() const noexcept {
    return std::sqrt(std::tgamma(3.0 / shape_) / std::tgamma(1.0 / shape_)) / std_dev_;
  }
  double amplitude() const noexcept {
    return beta() * shape_ / (2.0 * std::tgamma(1.0 / shape_));
  }

 private:
  double mean_;
  double std_dev_;
  double shape_;
};

/// Host law plus the noise-to-host scale ratio g (noise scale = g * host scale).
class ChannelSpec {
 public:
  ChannelSpec(double g, LaplaceParams host) : g_(g), host_(host) {
    if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("channel ratio g must be > 0");
  }

  double g() const noexcept { return g_; }
  const LaplaceParams& host() const noexcept { return host_; }
  double noise_scale() const noexcept { return g_ * host_.scale(); }
  LaplaceParams noise() const { return LaplaceParams(0.0, noise_scale()); }

 private:
  double g_;
  LaplaceParams host_;
};

// ---------------------------------------------------------------------------
// Single Laplace / GGD

inline double laplace_pdf(double x, const LaplaceParams& p) noexcept {
  return std::exp(-std::abs(x - p.location()) / p.scale()) / (2.0 * p.scale());
}

inline double laplace_cdf(double x, const LaplaceParams& p) noexcept {
  const double u = (x - p.location()) / p.scale();
  return u < 0.0 ? 0.5 * std::exp(u) : 1.0 - 0.5 * std::exp(-u);
}

/// Inverse-CDF transform of an open-interval uniform variate.
inline double laplace_quantile(double u, const LaplaceParams& p) noexcept {
  const double c = u - 0.5;
  const double s = c < 0.0 ? -1.0 : 1.0;
  return p.location() - p.scale() * s * std::log1p(-2.0 * std::abs(c));
}

inline double laplace_draw(Engine& eng, const LaplaceParams& p) {
  return laplace_quantile(open_unit(eng()), p);
}

inline std::vector<double> laplace_sample(const LaplaceParams& p, std::size_t count,
                                          SeedToken seed) {
  std::vector<double> out;
  out.reserve(count);
  Engine eng = make_engine(seed);
  for (std::size_t i = 0; i < count; ++i) out.push_back(laplace_draw(eng, p));
  return out;
}

inline double ggd_pdf(double x, const GgdParams& p) noexcept {
  return p.amplitude() * std::exp(-std::pow(std::abs(p.beta() * (x - p.mean())), p.shape()));
}

// ---------------------------------------------------------------------------
// Sum of two independent zero-location Laplace variables

/// Density and tail of X + N, X ~ Laplace(0, b_h), N ~ Laplace(0, b_n).
///
/// With b_lo < b_hi and d = b_hi - b_lo the density is
///   b_hi e^{-|y|/b_hi} [1 - (b_lo/b_hi) e^{-|y| d/(b_lo b_hi)}] / (2 d (b_hi + b_lo)),
/// evaluated with log1p/expm1 so it stays accurate as d -> 0 and never
/// overflows for large |y|. Below a relative gap of 1e-9 the equal-scale
/// limit is used at the mean scale.
class LaplaceSum {
 public:
  static constexpr double kEqualTolerance = 1e-9;

  LaplaceSum(double host_scale, double noise_scale)
      : lo_(std::min(host_scale, noise_scale)), hi_(std::max(host_scale, noise_scale)) {
    if (!(lo_ > 0.0) || !std::isfinite(hi_)) throw ConfigError("scales must be finite and > 0");
    equal_ = std::abs(noise_scale - host_scale) < kEqualTolerance * host_scale;
    d_ = hi_ - lo_;
    mean_scale_ = 0.5 * (lo_ + hi_);
    log_ratio_ = std::log1p(-d_ / hi_);
    rate_gap_ = d_ / (lo_ * hi_);
  }

  bool equal_branch() const noexcept { return equal_; }
  double slow_scale() const noexcept { return hi_; }

  double pdf(double y) const noexcept {
    const double u = std::abs(y);
    if (equal_) {
      const double b = mean_scale_;
      return std::exp(-u / b) * (1.0 + u / b) / (4.0 * b);
    }
    return hi_ * std::exp(-u / hi_) * -std::expm1(log_ratio_ - u * rate_gap_) /
           (2.0 * d_ * (hi_ + lo_));
  }

  /// ln pdf(y) with the slowly decaying exponential factored out, so that it
  /// is finite for every finite y. The bracket is floored at the smallest
  /// normal double before the log.
  double log_pdf(double y) const noexcept {
    const double u = std::abs(y);
    if (equal_) {
      const double b = mean_scale_;
      return -std::log(4.0 * b) - u / b + std::log1p(u / b);
    }
    const double bracket =
        std::max(-std::expm1(log_ratio_ - u * rate_gap_), std::numeric_limits<double>::min());
    return std::log(hi_ / (2.0 * d_ * (hi_ + lo_))) - u / hi_ + std::log(bracket);
  }

  /// P(X + N > t).
  double tail(double t) const noexcept {
    if (t < 0.0) return 1.0 - upper_tail(-t);
    return upper_tail(t);
  }

  double cdf(double t) const noexcept { return 1.0 - tail(t); }

 private:
  double upper_tail(double t) const noexcept {
    if (equal_) {
      const double b = mean_scale_;
      return 0.25 * std::exp(-t / b) * (2.0 + t / b);
    }
    return hi_ * hi_ * std::exp(-t / hi_) * -std::expm1(2.0 * log_ratio_ - t * rate_gap_) /
           (2.0 * d_ * (hi_ + lo_));
  }

  double lo_;
  double hi_;
  double d_ = 0.0;
  double mean_scale_ = 0.0;
  double log_ratio_ = 0.0;
  double rate_gap_ = 0.0;
  bool equal_ = false;
};

inline double sum_pdf(double y, double host_scale, double noise_scale) {
  return LaplaceSum(host_scale, noise_scale).pdf(y);
}

inline double sum_tail(double t, double host_scale, double noise_scale) {
  return LaplaceSum(host_scale, noise_scale).tail(t);
}

// ---------------------------------------------------------------------------
// Estimation and SNR bookkeeping

/// ML fit: location = sample median, scale = mean absolute deviation from it.
/// For an even count the midpoint of the two central order statistics is used.
inline LaplaceParams estimate_laplace(std::span<const double> samples) {
  if (samples.size() < 2) throw DegenerateInputError("need at least two samples");
  std::vector<double> v(samples.begin(), samples.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double median = v[mid];
  if (v.size() % 2 == 0) {
    const double below = *std::max_element(v.begin(), v.begin() + mid);
    median = 0.5 * (below + median);
  }
  double mad = 0.0;
  for (double x : samples) mad += std::abs(x - median);
  mad /= static_cast<double>(samples.size());
  if (!(mad > 0.0)) throw DegenerateInputError("all samples are identical; scale would be 0");
  return LaplaceParams(median, mad);
}

/// SNR in dB for a noise-to-host scale ratio g: -20 log10(g).
inline double snr_db(double g) noexcept { return -20.0 * std::log10(g); }
inline double snr_db(const ChannelSpec& spec) noexcept { return snr_db(spec.g()); }

inline double g_from_snr_db(double snr) noexcept { return std::pow(10.0, -snr / 20.0); }

}  // namespace lapwm
