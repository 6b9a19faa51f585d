#pragma once

#include <filesystem>
#include <optional>

#include "ivusim/imaging/image.hpp"

namespace ivusim {

// 8-bit grayscale raster I/O. Binary PGM (P5) and PNG are supported, chosen by
// file extension. Intensities in [0,1] are quantized as round(255 v) on write
// and mapped back as v / 255 on read; values outside [0,1] are clamped.

Grid<double> read_gray8(const std::filesystem::path& path);
void write_gray8(const std::filesystem::path& path, const Grid<double>& g);

/// Domain declared by a `.polar.` or `.cart.` infix in the file name, if any.
std::optional<Domain> domain_from_filename(const std::filesystem::path& path);

/// Reads an image and checks that its file name carries no conflicting tag.
template <Domain D>
Image<D> load_image(const std::filesystem::path& path) {
  if (auto d = domain_from_filename(path); d && *d != D) {
    throw ValidationError("load_image: " + path.string() +
                          " is tagged for the other coordinate domain");
  }
  return Image<D>(read_gray8(path));
}

template <Domain D>
void save_image(const std::filesystem::path& path, const Image<D>& img) {
  write_gray8(path, img.grid());
}

/// Raw 8-bit codes for a label/uint8 raster (no intensity scaling).
Grid<unsigned char> read_u8(const std::filesystem::path& path);
void write_u8(const std::filesystem::path& path, const Grid<unsigned char>& g);

}  // namespace ivusim
