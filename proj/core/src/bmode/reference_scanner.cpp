#include "ivusim/bmode/reference_scanner.hpp"

#include <cmath>
#include <random>

namespace ivusim {

PolarImage render_reference_frame(const PolarLabelMask& mask, const ReferenceScannerParams& params,
                                  std::uint64_t seed) {
  if (!(params.far_gain > 0.0) || !(params.gamma > 0.0)) {
    throw ValidationError("reference scanner: far_gain and gamma must be > 0");
  }
  std::mt19937_64 rng(seed);
  auto map = mask_to_echogenicity(mask, params.echogenicity, rng());
  const double nr = static_cast<double>(map.rows());
  const double decay = std::log(params.far_gain);
  for (std::size_t r = 0; r < map.rows(); ++r) {
    const double gain = std::exp(decay * static_cast<double>(r) / nr);
    for (auto& v : map.values.row(r)) v *= gain;
  }
  auto img = simulate(map, params.bmode, rng());
  const auto ring_rows = static_cast<std::size_t>(std::lround(params.ring_fraction * nr));
  for (std::size_t r = 0; r < img.rows(); ++r) {
    for (std::size_t c = 0; c < img.cols(); ++c) {
      double v = std::pow(img(r, c), params.gamma);
      if (r < ring_rows) v = std::max(v, params.ring_level);
      img(r, c) = v;
    }
  }
  return img;
}

}  // namespace ivusim
