#include "ivusim/eval/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ivusim/error.hpp"

namespace ivusim::eval {

std::size_t intensity_bin(double v, std::size_t bins) {
  const double c = std::clamp(v, 0.0, 1.0);
  return std::min(static_cast<std::size_t>(c * static_cast<double>(bins)), bins - 1);
}

RegionHistograms::RegionHistograms(std::size_t bins) : bins_(bins) {
  if (bins == 0) throw ValidationError("histogram needs at least one bin");
  for (auto& c : counts_) c.assign(bins, 0);
}

void RegionHistograms::add(const PolarImage& img, const PolarLabelMask& mask) {
  if (img.rows() != mask.rows() || img.cols() != mask.cols()) {
    throw ShapeError("region histogram: image and mask grids differ");
  }
  const auto px = img.grid().values();
  const auto lb = mask.labels.values();
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (!std::isfinite(px[i])) throw ValidationError("region histogram: non-finite pixel");
    const auto k = static_cast<std::size_t>(lb[i]);
    ++counts_[k][intensity_bin(px[i], bins_)];
    ++totals_[k];
  }
}

RegionPmf RegionHistograms::pmf(TissueClass c) const {
  const auto k = static_cast<std::size_t>(c);
  if (totals_[k] == 0) {
    throw ValidationError("empty region: no " + std::string(tissue_name(c)) + " pixels");
  }
  RegionPmf p;
  p.region = c;
  p.n_pixels = totals_[k];
  p.mass.resize(bins_);
  const double n = static_cast<double>(totals_[k]);
  for (std::size_t b = 0; b < bins_; ++b) p.mass[b] = static_cast<double>(counts_[k][b]) / n;
  return p;
}

RegionPmf region_pmf(const PolarImage& img, const PolarLabelMask& mask, TissueClass cls,
                     std::size_t bins) {
  RegionHistograms h(bins);
  h.add(img, mask);
  return h.pmf(cls);
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw ShapeError("js_divergence: " + std::to_string(p.size()) + " vs " + std::to_string(q.size()) +
                     " bins");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0) throw ValidationError("js_divergence: negative mass");
    const double m = 0.5 * (p[i] + q[i]);
    const double a = p[i] > 0.0 ? p[i] * std::log2(p[i] / m) : 0.0;
    const double b = q[i] > 0.0 ? q[i] * std::log2(q[i] / m) : 0.0;
    s += a + b;
  }
  return std::clamp(0.5 * s, 0.0, 1.0);
}

double js_divergence(const RegionPmf& p, const RegionPmf& q) { return js_divergence(p.mass, q.mass); }

}  // namespace ivusim::eval
