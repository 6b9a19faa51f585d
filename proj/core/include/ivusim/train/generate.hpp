#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ivusim/bmode/pseudo_bmode.hpp"
#include "ivusim/nn/models.hpp"
#include "ivusim/train/checkpoint.hpp"

namespace ivusim::train {

struct GenerateParams {
  BmodeParams bmode;
  std::size_t cartesian_side = 384;
};

struct GeneratedImage {
  PolarImage stage0;     // full-resolution pseudo B-mode
  PolarImage refined;    // G_I output at the low resolution
  PolarImage polar;      // G_II output
  CartesianImage cartesian;
  double milliseconds = 0.0;  // whole chain, this image's share
};

/// Stage 0 -> resize -> G_I -> G_II -> scan conversion, with both networks
/// loaded once and reused across calls.
class ImageGenerator {
 public:
  /// `low_size` is the G_I input side.
  ImageGenerator(std::unique_ptr<nn::RefinerG1<float>> g1, std::unique_ptr<nn::GeneratorG2<float>> g2,
                 std::size_t low_size, GenerateParams params);

  /// Both networks from a Stage II checkpoint (which embeds G_I).
  static ImageGenerator from_checkpoint(const Checkpoint& stage2, const nn::RefinerConfig& g1,
                                        const nn::Generator2Config& g2, GenerateParams params);

  GeneratedImage generate(const EchogenicityMap& map, std::uint64_t seed);

  /// Networks run on chunks of `batch` maps; per-image time is the image's
  /// own Stage 0 and scan conversion plus an equal share of its chunk's
  /// network time.
  std::vector<GeneratedImage> generate_batch(std::span<const EchogenicityMap> maps,
                                             std::span<const std::uint64_t> seeds, std::size_t batch);

  std::size_t low_size() const { return low_size_; }

 private:
  std::unique_ptr<nn::RefinerG1<float>> g1_;
  std::unique_ptr<nn::GeneratorG2<float>> g2_;
  GenerateParams params_;
  std::size_t low_size_;
};

struct LatencySummary {
  std::size_t n = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;
};

LatencySummary summarize_latency(std::vector<double> milliseconds);

}  // namespace ivusim::train
