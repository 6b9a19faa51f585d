#pragma once

#include <cstddef>

#include "ivusim/imaging/image.hpp"

namespace ivusim {

/// Resamples a polar frame onto a `side` x `side` Cartesian grid.
///
/// Pixel centers sit at half-integer coordinates and the catheter at
/// (side/2, side/2). A Cartesian pixel at radius r and angle a reads the
/// polar frame at row r / R * n_radial and column a / (2 pi) * n_angular with
/// bilinear weights; columns wrap around, rows clamp. Pixels farther than
/// R = side/2 from the center are set to 0.
CartesianImage polar_to_cartesian(const PolarImage& img, std::size_t side);

/// Inverse of polar_to_cartesian: samples along rays from the center.
/// Row k sits at radius k / n_radial * R, column j at angle 2 pi j / n_angular.
PolarImage cartesian_to_polar(const CartesianImage& img, std::size_t n_radial,
                              std::size_t n_angular);

}  // namespace ivusim
