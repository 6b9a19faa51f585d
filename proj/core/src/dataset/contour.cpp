#include "ivusim/dataset/contour.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ivusim/error.hpp"

namespace ivusim {

bool point_in_polygon(std::span<const Point2> polygon, Point2 p) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = polygon[i];
    const Point2& b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

void validate_annotation(const ContourAnnotation& ann) {
  if (ann.lumen.size() < 3) {
    throw ValidationError(ann.source_image_id + ": lumen contour needs >= 3 points");
  }
  if (ann.eel.size() < 3) {
    throw ValidationError(ann.source_image_id + ": EEL contour needs >= 3 points");
  }
  for (std::size_t i = 0; i < ann.lumen.size(); ++i) {
    if (!point_in_polygon(ann.eel, ann.lumen[i])) {
      throw ValidationError(ann.source_image_id + ": lumen vertex " + std::to_string(i) +
                            " lies outside the EEL contour");
    }
  }
}

Contour read_contour_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open contour file " + path.string());
  Contour out;
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    Point2 p;
    if (ls >> p.x >> p.y) out.push_back(p);
  }
  return out;
}

void write_contour_file(const std::filesystem::path& path, std::span<const Point2> contour) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write contour file " + path.string());
  out << std::setprecision(10);
  for (const auto& p : contour) out << p.x << ' ' << p.y << '\n';
}

}  // namespace ivusim
