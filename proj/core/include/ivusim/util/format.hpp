#pragma once

#include <array>
#include <charconv>
#include <string>

namespace ivusim {

/// Shortest decimal text that reads back to exactly `v`. Plain notation for
/// magnitudes in [1e-6, 1e15), exponent form otherwise.
inline std::string format_double(double v) {
  std::array<char, 512> buf{};
  const double a = v < 0 ? -v : v;
  const bool plain = a == 0.0 || (a >= 1e-6 && a < 1e15);
  auto [p, ec] = plain ? std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed)
                       : std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

/// Fixed-point text with `digits` decimals.
inline std::string format_fixed(double v, int digits) {
  std::array<char, 64> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
  return std::string(buf.data(), p);
}

}  // namespace ivusim
