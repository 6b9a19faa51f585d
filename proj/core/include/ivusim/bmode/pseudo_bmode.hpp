#pragma once

#include <cstdint>
#include <vector>

#include "ivusim/dataset/echogenicity.hpp"
#include "ivusim/imaging/image.hpp"

namespace ivusim {

/// Separable, space-invariant point spread function. Axial = rows (depth).
struct PsfParams {
  double f0 = 0.25;            // axial carrier, cycles per pixel
  double sigma_axial = 2.0;    // pixels
  double sigma_lateral = 3.0;  // pixels

  void validate() const;
};

/// Signed scatterer amplitudes, one per pixel.
struct ScattererField {
  Grid<double> values;
};

/// Pre-envelope radio-frequency-like image.
struct RfImage {
  Grid<double> values;
};

/// PSF kernel with its 1D factors; dense(r, c) == axial[r] * lateral[c].
struct PsfKernel {
  std::vector<double> axial;
  std::vector<double> lateral;
  Grid<double> dense;

  std::size_t axial_half() const { return axial.size() / 2; }
  std::size_t lateral_half() const { return lateral.size() / 2; }
};

/// amplitude(p) = echogenicity(p) * g(p), g i.i.d. N(0,1) from `seed`.
ScattererField generate_scatterers(const EchogenicityMap& map, std::uint64_t seed);

/// exp(-r^2 / 2 sa^2) cos(2 pi f0 r) * exp(-c^2 / 2 sl^2), truncated at
/// ceil(3 sigma) per axis and scaled to unit L2 norm.
PsfKernel psf_kernel(const PsfParams& params);

/// Zero-padded 2D convolution with the separable kernel; output has the
/// field's size and the kernel origin at its center tap.
RfImage convolve_rf(const ScattererField& field, const PsfKernel& kernel);

/// Magnitude of the analytic signal along each column (FFT-based Hilbert
/// transform over the full column length).
Grid<double> envelope(const RfImage& rf);

/// 20 log10(env / max) clipped to [-dr, 0] and mapped to [0,1]. An all-zero
/// envelope yields an all-zero image.
PolarImage log_compress(const Grid<double>& env, double dynamic_range_db);

struct BmodeParams {
  PsfParams psf;
  double dynamic_range_db = 40.0;
};

/// Stage 0: scatterers -> RF -> envelope -> log compression.
PolarImage simulate(const EchogenicityMap& map, const BmodeParams& params, std::uint64_t seed);

}  // namespace ivusim
