#include "ivusim/dataset/mask.hpp"

#include <cmath>
#include <numbers>

#include "ivusim/imaging/image_io.hpp"

namespace ivusim {
namespace {

TissueClass classify(const ContourAnnotation& ann, Point2 p) {
  if (point_in_polygon(ann.lumen, p)) return TissueClass::kLumen;
  if (point_in_polygon(ann.eel, p)) return TissueClass::kMedia;
  return TissueClass::kExterna;
}

}  // namespace

CartesianLabelMask rasterize_mask(const ContourAnnotation& ann, std::size_t side) {
  validate_annotation(ann);
  if (side < 2) throw ValidationError("rasterize_mask: side must be >= 2");
  CartesianLabelMask m{Grid<TissueClass>(side, side, TissueClass::kExterna)};
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      m.labels(i, j) = classify(ann, {static_cast<double>(j) + 0.5, static_cast<double>(i) + 0.5});
    }
  }
  return m;
}

PolarLabelMask rasterize_mask_polar(const ContourAnnotation& ann, std::size_t cart_side,
                                    std::size_t n_radial, std::size_t n_angular) {
  validate_annotation(ann);
  if (n_radial < 2 || n_angular < 2 || cart_side < 2) {
    throw ValidationError("rasterize_mask_polar: dims must be >= 2");
  }
  PolarLabelMask m{Grid<TissueClass>(n_radial, n_angular, TissueClass::kExterna)};
  const double center = static_cast<double>(cart_side) / 2.0;
  for (std::size_t j = 0; j < n_angular; ++j) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_angular);
    for (std::size_t k = 0; k < n_radial; ++k) {
      const double r = center * static_cast<double>(k) / static_cast<double>(n_radial);
      m.labels(k, j) = classify(ann, {center + r * std::cos(a), center + r * std::sin(a)});
    }
  }
  return m;
}

bool is_radially_ordered(const PolarLabelMask& m) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t k = 1; k < m.rows(); ++k) {
      if (m(k, j) < m(k - 1, j)) return false;
    }
  }
  return true;
}

void save_mask(const std::filesystem::path& path, const Grid<TissueClass>& labels) {
  Grid<unsigned char> raw(labels.rows(), labels.cols());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    static constexpr unsigned char kCode[] = {0, 128, 255};
    raw.values()[i] = kCode[static_cast<std::size_t>(labels.values()[i])];
  }
  write_u8(path, raw);
}

Grid<TissueClass> load_mask(const std::filesystem::path& path) {
  auto raw = read_u8(path);
  Grid<TissueClass> out(raw.rows(), raw.cols());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto v = raw.values()[i];
    out.values()[i] = v < 64 ? TissueClass::kLumen
                      : v < 192 ? TissueClass::kMedia
                                : TissueClass::kExterna;
  }
  return out;
}

}  // namespace ivusim
