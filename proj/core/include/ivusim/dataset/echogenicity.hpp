#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "ivusim/dataset/mask.hpp"

namespace ivusim {

/// Mean reflectivity and multiplicative texture spread of one tissue class.
struct ClassEchogenicity {
  double mean = 0.0;
  double spread = 0.0;
};

/// Per-class echogenicity, indexed by TissueClass.
struct EchogenicityParams {
  std::array<ClassEchogenicity, 3> classes{{{0.05, 0.1}, {0.35, 0.1}, {0.60, 0.1}}};

  ClassEchogenicity& operator[](TissueClass c) { return classes[static_cast<std::size_t>(c)]; }
  const ClassEchogenicity& operator[](TissueClass c) const {
    return classes[static_cast<std::size_t>(c)];
  }
};

/// Polar grid of non-negative mean reflectivity; input to the Stage 0 simulator.
struct EchogenicityMap {
  Grid<double> values;

  std::size_t rows() const { return values.rows(); }
  std::size_t cols() const { return values.cols(); }
  friend bool operator==(const EchogenicityMap&, const EchogenicityMap&) = default;
};

/// value = mean(class) * (1 + spread(class) * u), u ~ U[-1, 1] drawn from a
/// generator seeded with `seed`.
EchogenicityMap mask_to_echogenicity(const PolarLabelMask& mask, const EchogenicityParams& params,
                                     std::uint64_t seed);

/// Result of deriving class means from annotated real frames.
struct EchogenicityCalibration {
  EchogenicityParams params;
  /// Per-image region mean intensities, indexed by TissueClass.
  std::array<std::vector<double>, 3> region_means;
};

/// Sets each class mean to the pooled mean intensity of that region over the
/// given frames; spreads are copied from `base`.
EchogenicityCalibration calibrate_echogenicity(std::span<const PolarImage> images,
                                               std::span<const PolarLabelMask> masks,
                                               const EchogenicityParams& base = {});

}  // namespace ivusim
