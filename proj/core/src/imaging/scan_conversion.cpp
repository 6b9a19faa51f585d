#include "ivusim/imaging/scan_conversion.hpp"

#include <cmath>
#include <numbers>

#include "ivusim/imaging/intensity.hpp"

namespace ivusim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Bilinear read with circular columns and clamped rows.
double sample_polar(const Grid<double>& g, double row, double col) {
  const auto nr = static_cast<std::ptrdiff_t>(g.rows());
  const auto na = static_cast<std::ptrdiff_t>(g.cols());
  row = std::clamp(row, 0.0, static_cast<double>(nr - 1));
  const double r0f = std::floor(row);
  const double c0f = std::floor(col);
  const double fr = row - r0f;
  const double fc = col - c0f;
  const auto r0 = static_cast<std::ptrdiff_t>(r0f);
  const auto r1 = std::min(r0 + 1, nr - 1);
  auto wrap = [na](std::ptrdiff_t c) { return ((c % na) + na) % na; };
  const auto c0 = wrap(static_cast<std::ptrdiff_t>(c0f));
  const auto c1 = wrap(c0 + 1);
  const double top = (1.0 - fc) * g(r0, c0) + fc * g(r0, c1);
  const double bot = (1.0 - fc) * g(r1, c0) + fc * g(r1, c1);
  return (1.0 - fr) * top + fr * bot;
}

// Bilinear read in pixel-index coordinates with edge clamping.
double sample_clamped(const Grid<double>& g, double y, double x) {
  const auto n = static_cast<double>(g.rows());
  y = std::clamp(y, 0.0, n - 1.0);
  x = std::clamp(x, 0.0, n - 1.0);
  const double y0f = std::floor(y);
  const double x0f = std::floor(x);
  const auto y0 = static_cast<std::size_t>(y0f);
  const auto x0 = static_cast<std::size_t>(x0f);
  const auto y1 = std::min(y0 + 1, g.rows() - 1);
  const auto x1 = std::min(x0 + 1, g.cols() - 1);
  const double fy = y - y0f;
  const double fx = x - x0f;
  const double top = (1.0 - fx) * g(y0, x0) + fx * g(y0, x1);
  const double bot = (1.0 - fx) * g(y1, x0) + fx * g(y1, x1);
  return (1.0 - fy) * top + fy * bot;
}

}  // namespace

CartesianImage polar_to_cartesian(const PolarImage& img, std::size_t side) {
  if (side < 2) throw ValidationError("polar_to_cartesian: side must be >= 2");
  if (img.n_radial() < 1 || img.n_angular() < 1) {
    throw ShapeError("polar_to_cartesian: empty polar image");
  }
  require_finite(img.grid(), "polar_to_cartesian input");

  CartesianImage out(side, side, 0.0);
  const double center = static_cast<double>(side) / 2.0;
  const double radius = out.valid_radius();
  const double nr = static_cast<double>(img.n_radial());
  const double na = static_cast<double>(img.n_angular());
  for (std::size_t i = 0; i < side; ++i) {
    const double dy = static_cast<double>(i) + 0.5 - center;
    for (std::size_t j = 0; j < side; ++j) {
      const double dx = static_cast<double>(j) + 0.5 - center;
      const double r = std::hypot(dx, dy);
      if (r > radius) continue;
      double alpha = std::atan2(dy, dx);
      if (alpha < 0.0) alpha += kTwoPi;
      out(i, j) = sample_polar(img.grid(), r / radius * nr, alpha / kTwoPi * na);
    }
  }
  return out;
}

PolarImage cartesian_to_polar(const CartesianImage& img, std::size_t n_radial,
                              std::size_t n_angular) {
  if (n_radial < 2 || n_angular < 2) {
    throw ValidationError("cartesian_to_polar: n_radial and n_angular must be >= 2");
  }
  if (img.side() < 2) throw ShapeError("cartesian_to_polar: image too small");
  require_finite(img.grid(), "cartesian_to_polar input");

  PolarImage out(n_radial, n_angular);
  const double center = static_cast<double>(img.side()) / 2.0;
  const double radius = img.valid_radius();
  for (std::size_t j = 0; j < n_angular; ++j) {
    const double alpha =
        kTwoPi * static_cast<double>(j) / static_cast<double>(n_angular);
    const double ca = std::cos(alpha);
    const double sa = std::sin(alpha);
    for (std::size_t k = 0; k < n_radial; ++k) {
      const double r =
          radius * static_cast<double>(k) / static_cast<double>(n_radial);
      // Pixel centers sit at half-integers, so subtract 0.5 to get indices.
      const double x = center + r * ca - 0.5;
      const double y = center + r * sa - 0.5;
      out(k, j) = sample_clamped(img.grid(), y, x);
    }
  }
  return out;
}

}  // namespace ivusim
