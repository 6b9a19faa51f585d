#include "ivusim/bmode/pseudo_bmode.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <random>

#include "ivusim/imaging/intensity.hpp"

namespace ivusim {
namespace {

std::vector<double> gaussian_taps(double sigma, double carrier) {
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> taps;
  taps.reserve(static_cast<std::size_t>(2 * half + 1));
  double norm = 0.0;
  for (std::ptrdiff_t i = -half; i <= half; ++i) {
    const double x = static_cast<double>(i);
    double v = std::exp(-x * x / (2.0 * sigma * sigma));
    if (carrier > 0.0) v *= std::cos(2.0 * std::numbers::pi * carrier * x);
    taps.push_back(v);
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (auto& t : taps) t /= norm;
  return taps;
}

// FFTW's planner is not re-entrant.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void PsfParams::validate() const {
  if (!(f0 > 0.0 && f0 < 0.5)) throw ValidationError("psf: f0 must lie in (0, 0.5) cycles/px");
  if (!(sigma_axial > 0.0) || !(sigma_lateral > 0.0) || !std::isfinite(sigma_axial) ||
      !std::isfinite(sigma_lateral)) {
    throw ValidationError("psf: sigmas must be positive and finite");
  }
}

ScattererField generate_scatterers(const EchogenicityMap& map, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ScattererField f{Grid<double>(map.rows(), map.cols())};
  auto src = map.values.values();
  auto dst = f.values.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!std::isfinite(src[i]) || src[i] < 0.0) {
      throw ValidationError("generate_scatterers: echogenicity must be finite and >= 0");
    }
    dst[i] = src[i] * gauss(rng);
  }
  return f;
}

PsfKernel psf_kernel(const PsfParams& params) {
  params.validate();
  PsfKernel k;
  k.axial = gaussian_taps(params.sigma_axial, params.f0);
  k.lateral = gaussian_taps(params.sigma_lateral, 0.0);
  k.dense = Grid<double>(k.axial.size(), k.lateral.size());
  for (std::size_t r = 0; r < k.axial.size(); ++r) {
    for (std::size_t c = 0; c < k.lateral.size(); ++c) k.dense(r, c) = k.axial[r] * k.lateral[c];
  }
  return k;
}

RfImage convolve_rf(const ScattererField& field, const PsfKernel& kernel) {
  const auto& in = field.values;
  const std::size_t rows = in.rows();
  const std::size_t cols = in.cols();
  if (kernel.axial.size() > rows || kernel.lateral.size() > cols) {
    throw ValidationError("convolve_rf: kernel larger than field");
  }
  const auto ha = static_cast<std::ptrdiff_t>(kernel.axial_half());
  const auto hl = static_cast<std::ptrdiff_t>(kernel.lateral_half());
  const auto nr = static_cast<std::ptrdiff_t>(rows);
  const auto nc = static_cast<std::ptrdiff_t>(cols);

  // Axial pass: tmp(r, c) = sum_i in(r - i, c) * axial[i].
  Grid<double> tmp(rows, cols, 0.0);
  for (std::ptrdiff_t r = 0; r < nr; ++r) {
    auto out_row = tmp.row(static_cast<std::size_t>(r));
    for (std::ptrdiff_t i = -ha; i <= ha; ++i) {
      const std::ptrdiff_t src = r - i;
      if (src < 0 || src >= nr) continue;
      const double w = kernel.axial[static_cast<std::size_t>(i + ha)];
      auto in_row = in.row(static_cast<std::size_t>(src));
      for (std::size_t c = 0; c < cols; ++c) out_row[c] += w * in_row[c];
    }
  }
  // Lateral pass: out(r, c) = sum_j tmp(r, c - j) * lateral[j].
  RfImage rf{Grid<double>(rows, cols, 0.0)};
  for (std::size_t r = 0; r < rows; ++r) {
    auto t = tmp.row(r);
    auto o = rf.values.row(r);
    for (std::ptrdiff_t c = 0; c < nc; ++c) {
      double acc = 0.0;
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(-hl, c - nc + 1);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(hl, c);
      for (std::ptrdiff_t j = lo; j <= hi; ++j) {
        acc += t[static_cast<std::size_t>(c - j)] * kernel.lateral[static_cast<std::size_t>(j + hl)];
      }
      o[static_cast<std::size_t>(c)] = acc;
    }
  }
  return rf;
}

Grid<double> envelope(const RfImage& rf) {
  const auto& in = rf.values;
  const std::size_t n = in.rows();
  const std::size_t cols = in.cols();
  Grid<double> out(n, cols, 0.0);
  if (n == 0 || cols == 0) return out;
  require_finite(in, "envelope input");

  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n * cols));
  if (buf == nullptr) throw Error("envelope: allocation failed");
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  {
    std::lock_guard lock(fftw_planner_mutex());
    const int len = static_cast<int>(n);
    // One transform per column: stride = cols, distance between columns = 1.
    fwd = fftw_plan_many_dft(1, &len, static_cast<int>(cols), buf, nullptr,
                             static_cast<int>(cols), 1, buf, nullptr, static_cast<int>(cols), 1,
                             FFTW_FORWARD, FFTW_ESTIMATE);
    inv = fftw_plan_many_dft(1, &len, static_cast<int>(cols), buf, nullptr,
                             static_cast<int>(cols), 1, buf, nullptr, static_cast<int>(cols), 1,
                             FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n * cols; ++i) {
    buf[i][0] = in.values()[i];
    buf[i][1] = 0.0;
  }
  fftw_execute(fwd);
  // Single-sideband weights: keep DC and Nyquist, double positive, zero negative.
  for (std::size_t k = 0; k < n; ++k) {
    double w = 0.0;
    if (k == 0 || (n % 2 == 0 && k == n / 2)) {
      w = 1.0;
    } else if (k < (n + 1) / 2) {
      w = 2.0;
    }
    w /= static_cast<double>(n);
    for (std::size_t c = 0; c < cols; ++c) {
      buf[k * cols + c][0] *= w;
      buf[k * cols + c][1] *= w;
    }
  }
  fftw_execute(inv);
  for (std::size_t i = 0; i < n * cols; ++i) out.values()[i] = std::hypot(buf[i][0], buf[i][1]);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  fftw_free(buf);
  return out;
}

PolarImage log_compress(const Grid<double>& env, double dynamic_range_db) {
  if (!(dynamic_range_db > 0.0)) throw ValidationError("log_compress: dynamic range must be > 0");
  double peak = 0.0;
  for (double v : env.values()) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("log_compress: envelope must be finite, >= 0");
    peak = std::max(peak, v);
  }
  PolarImage out(env.rows(), env.cols(), 0.0);
  if (peak == 0.0) return out;
  auto src = env.values();
  auto dst = out.grid().values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] <= 0.0) continue;
    const double db = std::clamp(20.0 * std::log10(src[i] / peak), -dynamic_range_db, 0.0);
    dst[i] = (db + dynamic_range_db) / dynamic_range_db;
  }
  return out;
}

PolarImage simulate(const EchogenicityMap& map, const BmodeParams& params, std::uint64_t seed) {
  const auto kernel = psf_kernel(params.psf);
  const auto field = generate_scatterers(map, seed);
  const auto rf = convolve_rf(field, kernel);
  return log_compress(envelope(rf), params.dynamic_range_db);
}

}  // namespace ivusim
