#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ivusim/dataset/contour.hpp"
#include "ivusim/dataset/echogenicity.hpp"

namespace ivusim {

/// Closed boundary r(a) = base + sum_k amp_k cos(k a + phase_k), with r in
/// units of the polar depth axis (0 = catheter, 1 = edge of the field of view).
struct BoundaryCurve {
  double base = 0.0;
  std::vector<std::pair<double, double>> harmonics;  // (amplitude, phase), k = 1..

  double radius(double angle) const;
};

struct PhantomParams {
  std::size_t n_radial = 256;
  std::size_t n_angular = 256;
  // Allowed radius bands, as fractions of the field of view.
  double lumen_min = 0.15;
  double lumen_max = 0.35;
  double eel_min = 0.45;
  double eel_max = 0.75;
  int n_harmonics = 3;
  /// Total harmonic amplitude as a fraction of each band's half-width.
  double harmonic_fraction = 0.6;
  EchogenicityParams echogenicity;
};

/// Digitally defined vessel cross-section used when no clinical data is at hand.
struct Phantom {
  BoundaryCurve lumen;
  BoundaryCurve eel;
  PolarLabelMask mask;
  EchogenicityMap echogenicity;

  /// Cartesian contours on a `side` x `side` frame, `n_points` vertices each.
  ContourAnnotation to_annotation(std::size_t side, std::size_t n_points,
                                  std::string source_id) const;
};

/// Labels polar pixel (k, j) by comparing k / n_radial with both curves at
/// angle 2 pi j / n_angular.
PolarLabelMask label_from_curves(const BoundaryCurve& lumen, const BoundaryCurve& eel,
                                 std::size_t n_radial, std::size_t n_angular);

Phantom synth_phantom(std::uint64_t seed, const PhantomParams& params);

}  // namespace ivusim
