#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ivusim {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

using Contour = std::vector<Point2>;

/// Lumen and external elastic lamina (EEL) boundaries of one frame, in
/// Cartesian pixel coordinates. Both contours are implicitly closed.
struct ContourAnnotation {
  Contour lumen;
  Contour eel;
  std::string source_image_id;
};

/// Even-odd point-in-polygon test.
bool point_in_polygon(std::span<const Point2> polygon, Point2 p);

/// Throws ValidationError if a contour has fewer than 3 points or any lumen
/// vertex falls outside the EEL polygon.
void validate_annotation(const ContourAnnotation& ann);

/// Reads one `x y` pair per line; commas are accepted as separators.
Contour read_contour_file(const std::filesystem::path& path);
void write_contour_file(const std::filesystem::path& path, std::span<const Point2> contour);

}  // namespace ivusim
