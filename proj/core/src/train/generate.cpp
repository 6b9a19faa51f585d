#include "ivusim/train/generate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "ivusim/imaging/intensity.hpp"
#include "ivusim/imaging/scan_conversion.hpp"
#include "ivusim/train/corpus.hpp"

namespace ivusim::train {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

ImageGenerator::ImageGenerator(std::unique_ptr<nn::RefinerG1<float>> g1,
                               std::unique_ptr<nn::GeneratorG2<float>> g2, std::size_t low_size,
                               GenerateParams params)
    : g1_(std::move(g1)), g2_(std::move(g2)), params_(params), low_size_(low_size) {
  if (!g1_ || !g2_) throw ValidationError("generator: both networks are required");
  if (low_size_ == 0) throw ValidationError("generator: low resolution size must be > 0");
  params_.bmode.psf.validate();
}

ImageGenerator ImageGenerator::from_checkpoint(const Checkpoint& stage2, const nn::RefinerConfig& g1,
                                               const nn::Generator2Config& g2, GenerateParams params) {
  if (stage2.stage != "stage2") throw ValidationError("generate needs a stage2 checkpoint");
  auto a = std::make_unique<nn::RefinerG1<float>>(g1);
  restore(*a, stage2.section("g1"));
  auto b = std::make_unique<nn::GeneratorG2<float>>(g2);
  restore(*b, stage2.section("g2"));
  return ImageGenerator(std::move(a), std::move(b), g1.image_size, params);
}

GeneratedImage ImageGenerator::generate(const EchogenicityMap& map, std::uint64_t seed) {
  const std::uint64_t seeds[] = {seed};
  return std::move(generate_batch(std::span(&map, 1), seeds, 1).front());
}

std::vector<GeneratedImage> ImageGenerator::generate_batch(std::span<const EchogenicityMap> maps,
                                                           std::span<const std::uint64_t> seeds,
                                                           std::size_t batch) {
  if (maps.size() != seeds.size()) throw ValidationError("generate: one seed per map required");
  if (batch == 0) batch = 1;
  std::vector<GeneratedImage> out(maps.size());
  for (std::size_t b = 0; b < maps.size(); b += batch) {
    const std::size_t e = std::min(maps.size(), b + batch);
    std::vector<PolarImage> low;
    for (std::size_t i = b; i < e; ++i) {
      const auto t0 = Clock::now();
      out[i].stage0 = simulate(maps[i], params_.bmode, seeds[i]);
      low.push_back(resize(out[i].stage0, low_size_, low_size_));
      out[i].milliseconds = ms_since(t0);
    }
    const auto t0 = Clock::now();
    const auto x = to_batch(low, low_size_, low_size_);
    const auto refined = g1_->forward(x, nn::Mode::kInference);
    const auto high = g2_->forward(refined, nn::Mode::kInference);
    const double share = ms_since(t0) / static_cast<double>(e - b);
    for (std::size_t i = b; i < e; ++i) {
      const auto t1 = Clock::now();
      out[i].refined = from_batch(refined, i - b);
      out[i].polar = from_batch(high, i - b);
      out[i].cartesian = polar_to_cartesian(out[i].polar, params_.cartesian_side);
      out[i].milliseconds += share + ms_since(t1);
    }
  }
  return out;
}

LatencySummary summarize_latency(std::vector<double> ms) {
  LatencySummary s;
  s.n = ms.size();
  if (ms.empty()) return s;
  std::sort(ms.begin(), ms.end());
  double sum = 0.0;
  for (double v : ms) sum += v;
  s.mean_ms = sum / static_cast<double>(ms.size());
  const std::size_t mid = ms.size() / 2;
  s.median_ms = ms.size() % 2 ? ms[mid] : 0.5 * (ms[mid - 1] + ms[mid]);
  const auto p95 = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(ms.size()))) - 1;
  s.p95_ms = ms[std::min(p95, ms.size() - 1)];
  s.max_ms = ms.back();
  return s;
}

}  // namespace ivusim::train
