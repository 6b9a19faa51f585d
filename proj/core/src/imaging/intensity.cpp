#include "ivusim/imaging/intensity.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace ivusim {
namespace {

// Resample one line of `n_in` values (stride `stride`) to `n_out` values.
// Area average when shrinking, bilinear (cell-centre aligned) when growing.
std::vector<double> resample_line(const std::vector<double>& in,
                                  std::size_t n_out, bool circular) {
  const std::size_t n_in = in.size();
  std::vector<double> out(n_out, 0.0);
  if (n_out == n_in) return in;
  const double scale = static_cast<double>(n_in) / static_cast<double>(n_out);
  if (n_out < n_in) {
    for (std::size_t i = 0; i < n_out; ++i) {
      const double lo = static_cast<double>(i) * scale;
      const double hi = lo + scale;
      double acc = 0.0;
      auto k = static_cast<std::size_t>(std::floor(lo));
      for (; k < n_in && static_cast<double>(k) < hi; ++k) {
        const double a = std::max(lo, static_cast<double>(k));
        const double b = std::min(hi, static_cast<double>(k + 1));
        if (b > a) acc += (b - a) * in[k];
      }
      out[i] = acc / scale;
    }
    return out;
  }
  const auto n = static_cast<std::ptrdiff_t>(n_in);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double pos = (static_cast<double>(i) + 0.5) * scale - 0.5;
    const double f0 = std::floor(pos);
    const double t = pos - f0;
    auto i0 = static_cast<std::ptrdiff_t>(f0);
    auto i1 = i0 + 1;
    if (circular) {
      i0 = ((i0 % n) + n) % n;
      i1 = ((i1 % n) + n) % n;
    } else {
      i0 = std::clamp<std::ptrdiff_t>(i0, 0, n - 1);
      i1 = std::clamp<std::ptrdiff_t>(i1, 0, n - 1);
    }
    out[i] = (1.0 - t) * in[static_cast<std::size_t>(i0)] +
             t * in[static_cast<std::size_t>(i1)];
  }
  return out;
}

}  // namespace

void require_finite(const Grid<double>& g, const char* what) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g.values()[i])) {
      throw ValidationError(std::string(what) + ": non-finite value at flat index " +
                            std::to_string(i));
    }
  }
}

Grid<double> normalize_intensity(const Grid<double>& g) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  bool any = false;
  for (double v : g.values()) {
    if (!std::isfinite(v)) continue;
    any = true;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!any) throw ValidationError("normalize_intensity: no finite pixels");
  Grid<double> out(g.rows(), g.cols(), 0.0);
  if (hi == lo) return out;
  const double span = hi - lo;
  auto src = g.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (std::isfinite(src[i])) dst[i] = std::clamp((src[i] - lo) / span, 0.0, 1.0);
  }
  return out;
}

PolarImage resize(const PolarImage& img, std::size_t n_radial,
                  std::size_t n_angular) {
  if (n_radial < 2 || n_angular < 2) {
    throw ValidationError("resize: target dims must be >= 2");
  }
  if (img.n_radial() == 0 || img.n_angular() == 0) {
    throw ShapeError("resize: empty image");
  }
  const auto& g = img.grid();
  if (g.rows() == n_radial && g.cols() == n_angular) return img;

  // Angular axis first, then radial.
  Grid<double> tmp(g.rows(), n_angular);
  std::vector<double> line(g.cols());
  for (std::size_t r = 0; r < g.rows(); ++r) {
    auto src = g.row(r);
    line.assign(src.begin(), src.end());
    auto res = resample_line(line, n_angular, /*circular=*/true);
    std::copy(res.begin(), res.end(), tmp.row(r).begin());
  }
  PolarImage out(n_radial, n_angular);
  line.resize(g.rows());
  for (std::size_t c = 0; c < n_angular; ++c) {
    for (std::size_t r = 0; r < g.rows(); ++r) line[r] = tmp(r, c);
    auto res = resample_line(line, n_radial, /*circular=*/false);
    for (std::size_t r = 0; r < n_radial; ++r) out(r, c) = res[r];
  }
  return out;
}

}  // namespace ivusim
