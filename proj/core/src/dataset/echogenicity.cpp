#include "ivusim/dataset/echogenicity.hpp"

#include <random>
#include <string>

namespace ivusim {

EchogenicityMap mask_to_echogenicity(const PolarLabelMask& mask, const EchogenicityParams& params,
                                     std::uint64_t seed) {
  for (auto c : kAllTissueClasses) {
    if (!(params[c].mean >= 0.0)) {
      throw ValidationError("echogenicity: class mean for " + std::string(tissue_name(c)) +
                            " must be non-negative");
    }
    if (!(params[c].spread >= 0.0 && params[c].spread <= 1.0)) {
      throw ValidationError("echogenicity: spread must lie in [0,1]");
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  EchogenicityMap out{Grid<double>(mask.rows(), mask.cols())};
  auto labels = mask.labels.values();
  auto dst = out.values.values();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& cls = params[labels[i]];
    // Draw unconditionally so the stream does not depend on spread values.
    const double noise = u(rng);
    dst[i] = cls.mean * (1.0 + cls.spread * noise);
  }
  return out;
}

EchogenicityCalibration calibrate_echogenicity(std::span<const PolarImage> images,
                                               std::span<const PolarLabelMask> masks,
                                               const EchogenicityParams& base) {
  if (images.size() != masks.size() || images.empty()) {
    throw ValidationError("calibrate_echogenicity: need equal, non-zero counts of images and masks");
  }
  EchogenicityCalibration out;
  out.params = base;
  std::array<double, 3> sum{};
  std::array<std::size_t, 3> count{};
  for (std::size_t n = 0; n < images.size(); ++n) {
    const auto& img = images[n].grid();
    const auto& lab = masks[n].labels;
    if (img.rows() != lab.rows() || img.cols() != lab.cols()) {
      throw ShapeError("calibrate_echogenicity: image/mask size mismatch");
    }
    std::array<double, 3> s{};
    std::array<std::size_t, 3> c{};
    for (std::size_t i = 0; i < img.size(); ++i) {
      const auto k = static_cast<std::size_t>(lab.values()[i]);
      s[k] += img.values()[i];
      ++c[k];
    }
    for (std::size_t k = 0; k < 3; ++k) {
      if (c[k] == 0) continue;
      out.region_means[k].push_back(s[k] / static_cast<double>(c[k]));
      sum[k] += s[k];
      count[k] += c[k];
    }
  }
  for (std::size_t k = 0; k < 3; ++k) {
    if (count[k] == 0) {
      throw ValidationError("calibrate_echogenicity: no pixels of class " +
                            std::string(tissue_name(static_cast<TissueClass>(k))));
    }
    out.params.classes[k].mean = sum[k] / static_cast<double>(count[k]);
  }
  return out;
}

}  // namespace ivusim
