#include "ivusim/dataset/phantom.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace ivusim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

BoundaryCurve random_curve(std::mt19937_64& rng, double lo, double hi, int n_harmonics,
                           double fraction) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double half = 0.5 * (hi - lo);
  const double budget = fraction * half;
  BoundaryCurve c;
  // Split the amplitude budget across harmonics with decaying random weights.
  std::vector<double> w(static_cast<std::size_t>(std::max(n_harmonics, 0)));
  double wsum = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = unit(rng) / static_cast<double>(k + 1);
    wsum += w[k];
  }
  double used = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double amp = wsum > 0.0 ? budget * w[k] / wsum : 0.0;
    c.harmonics.emplace_back(amp, kTwoPi * unit(rng));
    used += amp;
  }
  // Base keeps base +/- used strictly inside [lo, hi].
  c.base = lo + used + (hi - lo - 2.0 * used) * unit(rng);
  return c;
}

}  // namespace

double BoundaryCurve::radius(double angle) const {
  double r = base;
  for (std::size_t k = 0; k < harmonics.size(); ++k) {
    r += harmonics[k].first * std::cos(static_cast<double>(k + 1) * angle + harmonics[k].second);
  }
  return r;
}

PolarLabelMask label_from_curves(const BoundaryCurve& lumen, const BoundaryCurve& eel,
                                 std::size_t n_radial, std::size_t n_angular) {
  PolarLabelMask m{Grid<TissueClass>(n_radial, n_angular, TissueClass::kExterna)};
  for (std::size_t j = 0; j < n_angular; ++j) {
    const double a = kTwoPi * static_cast<double>(j) / static_cast<double>(n_angular);
    const double rl = lumen.radius(a);
    const double re = eel.radius(a);
    for (std::size_t k = 0; k < n_radial; ++k) {
      const double rho = static_cast<double>(k) / static_cast<double>(n_radial);
      m.labels(k, j) = rho < rl ? TissueClass::kLumen
                       : rho < re ? TissueClass::kMedia
                                  : TissueClass::kExterna;
    }
  }
  return m;
}

Phantom synth_phantom(std::uint64_t seed, const PhantomParams& p) {
  if (!(p.lumen_min > 0.0 && p.lumen_min < p.lumen_max && p.lumen_max < p.eel_min &&
        p.eel_min < p.eel_max && p.eel_max <= 1.0)) {
    throw ValidationError(
        "synth_phantom: need 0 < lumen_min < lumen_max < eel_min < eel_max <= 1");
  }
  if (p.harmonic_fraction < 0.0 || p.harmonic_fraction > 1.0 || p.n_harmonics < 0) {
    throw ValidationError("synth_phantom: harmonic_fraction must lie in [0,1]");
  }
  if (p.n_radial < 2 || p.n_angular < 2) throw ValidationError("synth_phantom: dims must be >= 2");

  std::mt19937_64 rng(seed);
  Phantom ph;
  ph.lumen = random_curve(rng, p.lumen_min, p.lumen_max, p.n_harmonics, p.harmonic_fraction);
  ph.eel = random_curve(rng, p.eel_min, p.eel_max, p.n_harmonics, p.harmonic_fraction);
  ph.mask = label_from_curves(ph.lumen, ph.eel, p.n_radial, p.n_angular);
  ph.echogenicity = mask_to_echogenicity(ph.mask, p.echogenicity, rng());
  return ph;
}

ContourAnnotation Phantom::to_annotation(std::size_t side, std::size_t n_points,
                                         std::string source_id) const {
  ContourAnnotation ann;
  ann.source_image_id = std::move(source_id);
  const double c = static_cast<double>(side) / 2.0;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double a = kTwoPi * static_cast<double>(i) / static_cast<double>(n_points);
    const double rl = lumen.radius(a) * c;
    const double re = eel.radius(a) * c;
    ann.lumen.push_back({c + rl * std::cos(a), c + rl * std::sin(a)});
    ann.eel.push_back({c + re * std::cos(a), c + re * std::sin(a)});
  }
  return ann;
}

}  // namespace ivusim
