#pragma once

#include <cstdint>

#include "ivusim/bmode/pseudo_bmode.hpp"
#include "ivusim/dataset/mask.hpp"

namespace ivusim {

/// A second forward model, deliberately different from the Stage 0 defaults,
/// that renders labelled phantoms into frames standing in for clinical data.
/// It adds depth attenuation, a dark media band against a bright externa, a
/// bright catheter ring and a display gamma on top of the plain pseudo B-mode
/// chain.
struct ReferenceScannerParams {
  EchogenicityParams echogenicity{{{{0.02, 0.35}, {0.12, 0.30}, {1.00, 0.40}}}};
  BmodeParams bmode{{0.20, 1.5, 2.0}, 60.0};
  /// Echogenicity gain at the far edge of the field of view relative to the
  /// catheter; decays exponentially in between.
  double far_gain = 0.30;
  /// Bright catheter ring depth as a fraction of the rows.
  double ring_fraction = 0.03;
  double ring_level = 0.92;
  double gamma = 2.0;
};

PolarImage render_reference_frame(const PolarLabelMask& mask, const ReferenceScannerParams& params,
                                  std::uint64_t seed);

}  // namespace ivusim
