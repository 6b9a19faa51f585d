#pragma once

#include <cstddef>

#include "ivusim/imaging/image.hpp"

namespace ivusim {

/// Affine rescale of the finite pixels to [0,1]. A constant image maps to all
/// zeros; non-finite pixels map to 0. Throws if no pixel is finite.
Grid<double> normalize_intensity(const Grid<double>& g);

template <Domain D>
Image<D> normalize_intensity(const Image<D>& img) {
  return Image<D>(normalize_intensity(img.grid()));
}

/// Separable resampling. Each axis is area-averaged when shrinking and
/// bilinearly interpolated when growing; the angular axis wraps.
PolarImage resize(const PolarImage& img, std::size_t n_radial,
                  std::size_t n_angular);

/// Throws ValidationError naming `what` if any pixel is NaN or infinite.
void require_finite(const Grid<double>& g, const char* what);

}  // namespace ivusim
