#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ivusim/dataset/mask.hpp"
#include "ivusim/imaging/image.hpp"

namespace ivusim::eval {

inline constexpr std::size_t kPmfBins = 256;

/// Intensity bin of v in [0,1]: min(floor(v * bins), bins - 1). Values
/// outside [0,1] are clamped first.
std::size_t intensity_bin(double v, std::size_t bins = kPmfBins);

struct RegionPmf {
  TissueClass region = TissueClass::kLumen;
  std::vector<double> mass;
  std::size_t n_pixels = 0;
};

/// Per-class intensity counts pooled over any number of images.
class RegionHistograms {
 public:
  explicit RegionHistograms(std::size_t bins = kPmfBins);

  /// Throws on shape mismatch or non-finite pixels.
  void add(const PolarImage& img, const PolarLabelMask& mask);

  std::size_t count(TissueClass c) const { return totals_[static_cast<std::size_t>(c)]; }
  /// Throws ValidationError naming the class when no pixel was seen.
  RegionPmf pmf(TissueClass c) const;

 private:
  std::size_t bins_;
  std::array<std::vector<std::uint64_t>, 3> counts_;
  std::array<std::size_t, 3> totals_{};
};

/// Normalized histogram of img where mask == cls.
RegionPmf region_pmf(const PolarImage& img, const PolarLabelMask& mask, TissueClass cls,
                     std::size_t bins = kPmfBins);

/// Jensen-Shannon divergence in bits: 0.5 KL(p||m) + 0.5 KL(q||m),
/// m = (p + q) / 2, with 0 log 0 = 0. Lies in [0,1].
double js_divergence(std::span<const double> p, std::span<const double> q);
double js_divergence(const RegionPmf& p, const RegionPmf& q);

}  // namespace ivusim::eval
