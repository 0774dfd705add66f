#pragma once

// Orthonormal separable 4x4 DCT-II and the 4x4 zig-zag scan.

#include <array>
#include <cmath>
#include <numbers>

namespace lapwm {

/// Row-major 4x4 block.
using Block4 = std::array<double, 16>;
using Matrix4 = std::array<std::array<double, 4>, 4>;

/// G[k][n] = c_k cos(pi (2n + 1) k / 8), c_0 = 1/2, c_k = 1/sqrt(2).
inline const Matrix4& dct4_matrix() {
  static const Matrix4 g = [] {
    Matrix4 m{};
    for (int k = 0; k < 4; ++k) {
      const double c = k == 0 ? 0.5 : std::sqrt(0.5);
      for (int n = 0; n < 4; ++n) m[k][n] = c * std::cos(std::numbers::pi * (2 * n + 1) * k / 8.0);
    }
    return m;
  }();
  return g;
}

/// Coefficients = G * B * G^T.
inline Block4 fdct4(const Block4& block) {
  const Matrix4& g = dct4_matrix();
  Block4 tmp{};
  Block4 out{};
  for (int r = 0; r < 4; ++r)
    for (int k = 0; k < 4; ++k) {
      double s = 0.0;
      for (int n = 0; n < 4; ++n) s += block[r * 4 + n] * g[k][n];
      tmp[r * 4 + k] = s;
    }
  for (int k = 0; k < 4; ++k)
    for (int c = 0; c < 4; ++c) {
      double s = 0.0;
      for (int n = 0; n < 4; ++n) s += g[k][n] * tmp[n * 4 + c];
      out[k * 4 + c] = s;
    }
  return out;
}

/// Block = G^T * C * G.
inline Block4 idct4(const Block4& coeffs) {
  const Matrix4& g = dct4_matrix();
  Block4 tmp{};
  Block4 out{};
  for (int r = 0; r < 4; ++r)
    for (int n = 0; n < 4; ++n) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += coeffs[r * 4 + k] * g[k][n];
      tmp[r * 4 + n] = s;
    }
  for (int n = 0; n < 4; ++n)
    for (int c = 0; c < 4; ++c) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += g[k][n] * tmp[k * 4 + c];
      out[n * 4 + c] = s;
    }
  return out;
}

/// Zig-zag index -> row-major position in a 4x4 block.
inline constexpr std::array<int, 16> kZigZag4 = {0, 1, 4, 8, 5, 2, 3, 6, 9, 12, 13, 10, 7, 11, 14, 15};

}  // namespace lapwm
