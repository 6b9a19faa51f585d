#pragma once

// Reference computations written from first principles, independent of the
// library code they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace oracle {

/// Row-major dense matrix of doubles.
struct Dense {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;
  Dense() = default;
  Dense(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), v(r * c, fill) {}
  double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

/// out(r, c) = sum_{i, j} field(r - i + hr, c - j + hc) * k(i, j), zero outside
/// the field. Plain nested loops.
inline Dense convolve_same(const Dense& field, const Dense& k) {
  Dense out(field.rows, field.cols);
  const long hr = static_cast<long>(k.rows / 2);
  const long hc = static_cast<long>(k.cols / 2);
  for (long r = 0; r < static_cast<long>(field.rows); ++r) {
    for (long c = 0; c < static_cast<long>(field.cols); ++c) {
      double acc = 0.0;
      for (long i = 0; i < static_cast<long>(k.rows); ++i) {
        for (long j = 0; j < static_cast<long>(k.cols); ++j) {
          long fr = r - (i - hr);
          long fc = c - (j - hc);
          if (fr < 0 || fc < 0 || fr >= static_cast<long>(field.rows) ||
              fc >= static_cast<long>(field.cols)) {
            continue;
          }
          acc += field.at(fr, fc) * k.at(i, j);
        }
      }
      out.at(r, c) = acc;
    }
  }
  return out;
}

/// Jensen-Shannon divergence in bits, spelled out term by term.
inline double js_bits(const std::vector<double>& p, const std::vector<double>& q) {
  double kl_pm = 0.0;
  double kl_qm = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double m = 0.5 * p[i] + 0.5 * q[i];
    if (p[i] > 0.0) kl_pm += p[i] * (std::log(p[i]) - std::log(m));
    if (q[i] > 0.0) kl_qm += q[i] * (std::log(q[i]) - std::log(m));
  }
  return (0.5 * kl_pm + 0.5 * kl_qm) / std::log(2.0);
}

/// Binary cross-entropy with label 1 for refined, 0 for real.
inline double bce(const std::vector<double>& p_refined, const std::vector<double>& p_real) {
  double s = 0.0;
  for (double p : p_refined) s -= std::log(p);
  for (double p : p_real) s -= std::log(1.0 - p);
  return s;
}

/// Mean over images of the per-image sum of absolute differences.
inline double mean_l1(const std::vector<double>& a, const std::vector<double>& b, std::size_t n_images) {
  std::size_t per = a.size() / n_images;
  double total = 0.0;
  for (std::size_t n = 0; n < n_images; ++n) {
    double s = 0.0;
    for (std::size_t i = 0; i < per; ++i) s += std::fabs(a[n * per + i] - b[n * per + i]);
    total += s;
  }
  return total / static_cast<double>(n_images);
}

/// Kolmogorov-Smirnov distance between the sample and a Rayleigh law whose
/// scale is the maximum-likelihood fit.
inline double rayleigh_ks(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  double s2 = 0.0;
  for (double v : x) s2 += v * v;
  double sigma2 = s2 / (2.0 * static_cast<double>(x.size()));
  double d = 0.0;
  double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double f = 1.0 - std::exp(-x[i] * x[i] / (2.0 * sigma2));
    d = std::max(d, std::max(std::fabs((i + 1) / n - f), std::fabs(f - i / n)));
  }
  return d;
}

inline double psnr(const std::vector<double>& a, const std::vector<double>& b, double peak = 1.0) {
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mse += (a[i] - b[i]) * (a[i] - b[i]);
  mse /= static_cast<double>(a.size());
  if (mse == 0.0) return INFINITY;
  return 10.0 * std::log10(peak * peak / mse);
}

/// Bilinear sample of a row-major grid at fractional (row, col); columns wrap,
/// rows clamp.
inline double bilinear_wrap(const Dense& g, double r, double c) {
  r = std::clamp(r, 0.0, static_cast<double>(g.rows - 1));
  double r0 = std::floor(r);
  double fr = r - r0;
  std::size_t ir0 = static_cast<std::size_t>(r0);
  std::size_t ir1 = std::min(ir0 + 1, g.rows - 1);
  double n = static_cast<double>(g.cols);
  c = std::fmod(c, n);
  if (c < 0) c += n;
  double c0 = std::floor(c);
  double fc = c - c0;
  std::size_t ic0 = static_cast<std::size_t>(c0) % g.cols;
  std::size_t ic1 = (ic0 + 1) % g.cols;
  return (1 - fr) * ((1 - fc) * g.at(ir0, ic0) + fc * g.at(ir0, ic1)) +
         fr * ((1 - fc) * g.at(ir1, ic0) + fc * g.at(ir1, ic1));
}

/// Even-odd crossing test, written independently of the library.
inline bool inside_even_odd(const std::vector<std::pair<double, double>>& poly, double x, double y) {
  int crossings = 0;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    auto [xi, yi] = poly[i];
    auto [xj, yj] = poly[j];
    if ((yi > y) == (yj > y)) continue;
    double xc = xi + (y - yi) * (xj - xi) / (yj - yi);
    if (x < xc) ++crossings;
  }
  return crossings % 2 == 1;
}

/// Wilson score interval with z for 95% coverage.
inline std::pair<double, double> wilson(double k, double n) {
  const double z = 1.959964;
  double p = k / n;
  double denom = 1.0 + z * z / n;
  double center = (p + z * z / (2 * n)) / denom;
  double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  return {center - half, center + half};
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ivusim_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle
