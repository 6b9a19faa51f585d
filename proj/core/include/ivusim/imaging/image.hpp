#pragma once

#include <cstddef>
#include <string_view>
#include <utility>

#include "ivusim/imaging/grid.hpp"

namespace ivusim {

enum class Domain { kPolar, kCartesian };

constexpr std::string_view domain_tag(Domain d) {
  return d == Domain::kPolar ? "polar" : "cart";
}

/// Grayscale intensity image tagged with its coordinate domain.
///
/// Polar images store depth along rows and angle along columns; the angular
/// axis is circular. Cartesian images are square with the catheter at the
/// center and zero outside the inscribed disk.
template <Domain D>
class Image {
 public:
  static constexpr Domain kDomain = D;

  Image() = default;
  Image(std::size_t rows, std::size_t cols, double fill = 0.0)
      : grid_(rows, cols, fill) {
    check();
  }
  explicit Image(Grid<double> grid) : grid_(std::move(grid)) { check(); }

  std::size_t rows() const { return grid_.rows(); }
  std::size_t cols() const { return grid_.cols(); }

  std::size_t n_radial() const requires(D == Domain::kPolar) {
    return grid_.rows();
  }
  std::size_t n_angular() const requires(D == Domain::kPolar) {
    return grid_.cols();
  }
  std::size_t side() const requires(D == Domain::kCartesian) {
    return grid_.rows();
  }
  double valid_radius() const requires(D == Domain::kCartesian) {
    return static_cast<double>(grid_.rows()) / 2.0;
  }

  double& operator()(std::size_t r, std::size_t c) { return grid_(r, c); }
  double operator()(std::size_t r, std::size_t c) const { return grid_(r, c); }

  Grid<double>& grid() { return grid_; }
  const Grid<double>& grid() const { return grid_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  void check() const {
    if constexpr (D == Domain::kCartesian) {
      if (grid_.rows() != grid_.cols()) {
        throw ShapeError("cartesian image must be square");
      }
    }
  }

  Grid<double> grid_;
};

using PolarImage = Image<Domain::kPolar>;
using CartesianImage = Image<Domain::kCartesian>;

enum class TissueClass : unsigned char { kLumen = 0, kMedia = 1, kExterna = 2 };

inline constexpr TissueClass kAllTissueClasses[] = {
    TissueClass::kLumen, TissueClass::kMedia, TissueClass::kExterna};

constexpr std::string_view tissue_name(TissueClass c) {
  switch (c) {
    case TissueClass::kLumen:
      return "lumen";
    case TissueClass::kMedia:
      return "media";
    case TissueClass::kExterna:
      return "externa";
  }
  return "?";
}

}  // namespace ivusim
