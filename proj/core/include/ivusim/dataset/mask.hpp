#pragma once

#include <array>
#include <cstddef>
#include <filesystem>

#include "ivusim/dataset/contour.hpp"
#include "ivusim/imaging/image.hpp"

namespace ivusim {

/// Per-pixel tissue class on a polar or Cartesian grid.
template <Domain D>
struct LabelMask {
  Grid<TissueClass> labels;

  std::size_t rows() const { return labels.rows(); }
  std::size_t cols() const { return labels.cols(); }
  TissueClass operator()(std::size_t r, std::size_t c) const { return labels(r, c); }
  friend bool operator==(const LabelMask&, const LabelMask&) = default;
};

using PolarLabelMask = LabelMask<Domain::kPolar>;
using CartesianLabelMask = LabelMask<Domain::kCartesian>;

/// Pixel count per class, indexed by TissueClass.
template <Domain D>
std::array<std::size_t, 3> class_counts(const LabelMask<D>& m) {
  std::array<std::size_t, 3> out{};
  for (auto c : m.labels.values()) ++out[static_cast<std::size_t>(c)];
  return out;
}

/// Labels pixel centers of a `side` x `side` grid: inside lumen -> LUMEN,
/// inside EEL only -> MEDIA, else EXTERNA (even-odd rule).
CartesianLabelMask rasterize_mask(const ContourAnnotation& ann, std::size_t side);

/// Same labeling evaluated directly at the polar sample positions of a frame
/// whose Cartesian side length is `cart_side`.
PolarLabelMask rasterize_mask_polar(const ContourAnnotation& ann, std::size_t cart_side,
                                    std::size_t n_radial, std::size_t n_angular);

/// True if along every column the classes are non-decreasing with depth
/// (lumen innermost, externa outermost).
bool is_radially_ordered(const PolarLabelMask& m);

// Masks are stored as 8-bit rasters: lumen 0, media 128, externa 255.
void save_mask(const std::filesystem::path& path, const Grid<TissueClass>& labels);
Grid<TissueClass> load_mask(const std::filesystem::path& path);

}  // namespace ivusim
