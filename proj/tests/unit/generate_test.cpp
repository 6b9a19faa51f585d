#include <gtest/gtest.h>

#include "ivusim/dataset/phantom.hpp"
#include "ivusim/train/corpus.hpp"
#include "ivusim/train/generate.hpp"
#include "ivusim/train/trainer.hpp"
#include "support/oracles.hpp"

using namespace ivusim;
using namespace ivusim::train;

namespace {

struct Nets {
  nn::RefinerConfig g1;
  nn::Generator2Config g2;
};

Nets tiny() {
  Nets n;
  n.g1.image_size = 16;
  n.g1.width = 4;
  n.g1.blocks = 1;
  n.g2.input_size = 16;
  n.g2.width = 4;
  n.g2.blocks = 1;
  n.g2.up_widths = {4, 4};
  return n;
}

ImageGenerator make_generator(const Nets& n, std::size_t side = 96) {
  auto g1 = std::make_unique<nn::RefinerG1<float>>(n.g1);
  auto g2 = std::make_unique<nn::GeneratorG2<float>>(n.g2);
  g1->init(1);
  g2->init(2);
  return ImageGenerator(std::move(g1), std::move(g2), 16, {{}, side});
}

std::vector<EchogenicityMap> maps(std::size_t count) {
  PhantomParams p;
  p.n_radial = p.n_angular = 128;
  std::vector<EchogenicityMap> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(synth_phantom(i, p).echogenicity);
  return out;
}

}  // namespace

TEST(Generate, ShapesAndDeterminism) {
  auto gen = make_generator(tiny());
  auto m = maps(1);
  auto a = gen.generate(m[0], 5);
  EXPECT_EQ(a.stage0.rows(), 128u);
  EXPECT_EQ(a.refined.rows(), 16u);
  EXPECT_EQ(a.polar.rows(), 64u);
  EXPECT_EQ(a.polar.cols(), 64u);
  EXPECT_EQ(a.cartesian.side(), 96u);
  EXPECT_GT(a.milliseconds, 0.0);
  auto b = gen.generate(m[0], 5);
  EXPECT_EQ(a.polar, b.polar);
  EXPECT_EQ(a.cartesian, b.cartesian);
  EXPECT_NE(gen.generate(m[0], 6).polar, a.polar);
}

TEST(Generate, BatchMatchesSingleImages) {
  auto gen = make_generator(tiny());
  auto m = maps(5);
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  auto batch = gen.generate_batch(m, seeds, 2);
  ASSERT_EQ(batch.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    auto one = gen.generate(m[i], seeds[i]);
    EXPECT_EQ(batch[i].stage0, one.stage0);
    EXPECT_EQ(batch[i].polar, one.polar);
    EXPECT_GT(batch[i].milliseconds, 0.0);
  }
}

TEST(Generate, FromStageTwoCheckpoint) {
  auto n = tiny();
  nn::RefinerG1<float> g1(n.g1);
  g1.init(1);
  Stage2Config cfg;
  nn::Discriminator2Config d;
  d.image_size = 64;
  d.widths = {4, 4, 4, 4};
  d.head_channels = 2;
  Stage2Trainer t(cfg, n.g2, d, g1, 3);
  auto ck = t.checkpoint();
  auto gen = ImageGenerator::from_checkpoint(ck, n.g1, n.g2, {{}, 64});
  EXPECT_EQ(gen.low_size(), 16u);
  auto out = gen.generate(maps(1)[0], 1);
  auto expect = t.generator().forward(g1.forward(to_batch(std::span(&out.stage0, 1), 16, 16), nn::Mode::kInference),
                                      nn::Mode::kInference);
  EXPECT_EQ(out.polar, from_batch(expect, 0));
  Checkpoint wrong = ck;
  wrong.stage = "stage1";
  EXPECT_THROW(ImageGenerator::from_checkpoint(wrong, n.g1, n.g2, {}), ValidationError);
}

TEST(Generate, LatencySummary) {
  auto s = summarize_latency({4, 1, 3, 2, 10});
  EXPECT_EQ(s.n, 5u);
  EXPECT_DOUBLE_EQ(s.mean_ms, 4.0);
  EXPECT_DOUBLE_EQ(s.median_ms, 3.0);
  EXPECT_DOUBLE_EQ(s.max_ms, 10.0);
  EXPECT_GE(s.p95_ms, 4.0);
  EXPECT_LE(s.p95_ms, 10.0);
}
