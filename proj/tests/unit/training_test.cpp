#include <gtest/gtest.h>

#include <fstream>

#include <cmath>
#include <map>
#include <random>

#include "ivusim/train/adam.hpp"
#include "ivusim/train/checkpoint.hpp"
#include "ivusim/train/corpus.hpp"
#include "ivusim/train/history_buffer.hpp"
#include "ivusim/train/trainer.hpp"
#include "support/oracles.hpp"

using namespace ivusim;
using namespace ivusim::nn;
using namespace ivusim::train;

namespace {

Tensor<float> random_batch(std::size_t n, std::size_t side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0, 1);
  Tensor<float> t({n, 1, side, side});
  for (auto& v : t.values()) v = u(rng);
  return t;
}

Tensor<float> labelled_batch(std::size_t n, std::uint64_t seed) {
  Tensor<float> t({n, 1, 1, 1});
  for (std::size_t i = 0; i < n; ++i) t.values()[i] = static_cast<float>(seed * 1000 + i);
  return t;
}

struct Stage1Setup {
  Stage1Config cfg;
  RefinerConfig g;
  Discriminator1Config d;
};

Stage1Setup small_stage1() {
  Stage1Setup s;
  s.cfg.batch_size = 32;
  s.cfg.epochs = 2;
  s.g.image_size = 16;
  s.g.width = 8;
  s.g.blocks = 1;
  s.d.image_size = 16;
  s.d.widths = {4, 8, 8, 8};
  return s;
}

struct Stage2Setup {
  Stage2Config cfg;
  Generator2Config g;
  Discriminator2Config d;
};

Stage2Setup small_stage2() {
  Stage2Setup s;
  s.cfg.batch_size = 8;
  s.cfg.epochs = 2;
  s.g.input_size = 16;
  s.g.width = 4;
  s.g.blocks = 1;
  s.g.up_widths = {4, 4};
  s.d.image_size = 64;
  s.d.widths = {4, 4, 4, 4};
  s.d.head_channels = 2;
  return s;
}

}  // namespace

TEST(HistoryBuffer, CapacityAndDistinctSamples) {
  HistoryBuffer buf(4, 1);
  EXPECT_TRUE(buf.sample(2).empty());
  buf.push(labelled_batch(10, 1));
  EXPECT_EQ(buf.size(), 4u);
  auto s = buf.sample(4);
  std::set<float> seen(s.values().begin(), s.values().end());
  EXPECT_EQ(seen.size(), 4u);
  EXPECT_THROW(buf.sample(5), ValidationError);
}

TEST(HistoryBuffer, EvictionIsUniform) {
  const std::size_t cap = 20;
  HistoryBuffer buf(cap, 7);
  buf.push(labelled_batch(cap, 0));
  std::vector<double> counts(cap, 0.0);
  const int pushes = 200000;
  for (int i = 0; i < pushes; ++i)
    for (auto v : buf.push(labelled_batch(1, i + 1))) counts[v] += 1;
  double expected = double(pushes) / cap, chi2 = 0.0;
  for (double c : counts) {
    chi2 += (c - expected) * (c - expected) / expected;
    EXPECT_NEAR(c / pushes, 1.0 / cap, 0.05 / cap);
  }
  // 19 degrees of freedom; 43.8 is the 0.001 upper quantile.
  EXPECT_LT(chi2, 43.8);
}

TEST(HistoryBuffer, MixesHalfAndHalfOnceWarm) {
  HistoryBuffer buf(64, 3);
  auto cur = labelled_batch(8, 1);
  EXPECT_EQ(mix_with_history(cur, buf), cur);
  buf.push(labelled_batch(16, 2));
  auto mixed = mix_with_history(cur, buf);
  ASSERT_EQ(mixed.shape().n, 8u);
  int from_current = 0;
  for (float v : mixed.values()) from_current += v < 2000.0f;
  EXPECT_EQ(from_current, 4);
}

TEST(Adam, SingleStepMatchesClosedForm) {
  Parameter<float> p("w", {1, 1, 1, 2});
  p.value.values()[0] = 1.0f;
  p.value.values()[1] = -2.0f;
  p.grad.values()[0] = 0.5f;
  p.grad.values()[1] = -3.0f;
  AdamConfig cfg{0.5, 0.999, 1e-8};
  Adam<float> opt({&p}, cfg);
  opt.step(0.01);
  for (int k = 0; k < 2; ++k) {
    double g = k == 0 ? 0.5 : -3.0;
    double m = (1 - 0.5) * g, v = (1 - 0.999) * g * g;
    double mh = m / (1 - 0.5), vh = v / (1 - 0.999);
    double want = (k == 0 ? 1.0 : -2.0) - 0.01 * mh / (std::sqrt(vh) + 1e-8);
    EXPECT_NEAR(p.value.values()[k], want, 1e-6);
  }
  EXPECT_EQ(opt.steps(), 1u);
}

TEST(Schedule, StepDecay) {
  Stage2Config c;
  EXPECT_EQ(c.learning_rate(0), 0.0002);
  EXPECT_EQ(c.learning_rate(99), 0.0002);
  EXPECT_EQ(c.learning_rate(150), 0.0001);
  EXPECT_EQ(c.learning_rate(250), 0.00005);
  Stage1Config s1;
  EXPECT_EQ(s1.learning_rate, 0.001);
  EXPECT_EQ(s1.epochs, 20u);
  EXPECT_EQ(s1.batch_size, 512u);
  EXPECT_EQ(c.epochs, 1200u);
  EXPECT_EQ(c.batch_size, 64u);
}

TEST(Corpus, EpochBatchesCoverEverythingOnce) {
  std::mt19937_64 rng(1);
  auto b = epoch_batches(70, 32, rng);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[2].size(), 6u);
  std::vector<int> seen(70, 0);
  for (auto& chunk : b)
    for (auto i : chunk) ++seen[i];
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(Stage1, SmokeHistoryLengthAndFiniteness) {
  auto s = small_stage1();
  Stage1Trainer t(s.cfg, s.g, s.d, 5);
  auto syn = random_batch(256, 16, 1), real = random_batch(100, 16, 2);
  auto r = t.train(syn, real);
  EXPECT_EQ(r.history.size(), 2u * 8u * 2u);
  for (std::size_t i = 0; i < r.history.size(); ++i) {
    const auto& h = r.history[i];
    EXPECT_EQ(h.step, i);
    EXPECT_EQ(h.phase, i % 2 ? Phase::kGenerator : Phase::kDiscriminator);
    EXPECT_TRUE(std::isfinite(h.loss_g) && std::isfinite(h.loss_d) && std::isfinite(h.loss_reg));
    EXPECT_EQ(h.learning_rate, 0.001);
  }
  // A partial last batch still counts as an iteration.
  Stage1Trainer u(s.cfg, s.g, s.d, 5);
  EXPECT_EQ(u.train(random_batch(70, 16, 3), real).history.size(), 2u * 3u * 2u);
}

TEST(Stage1, DeterministicPerSeed) {
  auto s = small_stage1();
  auto syn = random_batch(96, 16, 1), real = random_batch(50, 16, 2);
  Stage1Trainer a(s.cfg, s.g, s.d, 9), b(s.cfg, s.g, s.d, 9), c(s.cfg, s.g, s.d, 10);
  auto ra = a.train(syn, real), rb = b.train(syn, real), rc = c.train(syn, real);
  EXPECT_EQ(ra.history, rb.history);
  EXPECT_EQ(parameter_hash(a.generator()), parameter_hash(b.generator()));
  EXPECT_NE(ra.history, rc.history);
}

TEST(Stage1, AlternationTouchesOnlyOneSide) {
  auto s = small_stage1();
  Stage1Trainer t(s.cfg, s.g, s.d, 3);
  auto x = random_batch(32, 16, 4), y = random_batch(32, 16, 5);
  auto g0 = parameter_hash(t.generator()), d0 = parameter_hash(t.discriminator());
  t.discriminator_step(x, y, 0.001);
  auto g1 = parameter_hash(t.generator()), d1 = parameter_hash(t.discriminator());
  EXPECT_EQ(g0, g1);
  EXPECT_NE(d0, d1);
  t.generator_step(x, 0.001);
  EXPECT_NE(parameter_hash(t.generator()), g1);
  EXPECT_EQ(parameter_hash(t.discriminator()), d1);
}

TEST(Stage1, MicroBatchesAccumulateTheSameGradient) {
  auto s = small_stage1();
  auto split = s;
  split.cfg.micro_batch = 8;
  Stage1Trainer whole(s.cfg, s.g, s.d, 4), parts(split.cfg, split.g, split.d, 4);
  auto x = random_batch(32, 16, 6);
  auto lw = whole.generator_step(x, 0.001), lp = parts.generator_step(x, 0.001);
  EXPECT_NEAR(lw.total, lp.total, 1e-3 * std::fabs(lw.total));
  auto pw = whole.generator().parameters(), pp = parts.generator().parameters();
  for (std::size_t k = 0; k < pw.size(); ++k)
    for (std::size_t i = 0; i < pw[k]->value.size(); ++i)
      EXPECT_NEAR(pw[k]->value.values()[i], pp[k]->value.values()[i], 1e-5);
}

TEST(Stage1, LargeLambdaPullsRefinedTowardInput) {
  auto s = small_stage1();
  s.cfg.lambda = 1e6;
  Stage1Trainer t(s.cfg, s.g, s.d, 8);
  auto x = random_batch(32, 16, 7);
  auto l1 = [&] { return loss_reg<float>(t.generator().forward(x, Mode::kInference), x); };
  const double initial = l1();
  for (int i = 0; i < 50; ++i) t.generator_step(x, 0.001);
  EXPECT_LT(l1(), initial);

  auto run = small_stage1();
  run.cfg.lambda = 1e6;
  run.cfg.batch_size = 8;
  run.cfg.epochs = 200;
  Stage1Trainer full(run.cfg, run.g, run.d, 8);
  auto syn = random_batch(128, 16, 8), real = random_batch(64, 16, 9);
  auto reg = [&] { return loss_reg<float>(full.generator().forward(syn, Mode::kInference), syn); };
  const double before = reg();
  full.train(syn, real);
  EXPECT_LT(reg(), 0.1 * before);
}

TEST(Stage1, CheckpointRoundTripAndResume) {
  oracle::TempDir dir("ckpt");
  auto s = small_stage1();
  auto syn = random_batch(64, 16, 1), real = random_batch(40, 16, 2);
  Stage1Trainer t(s.cfg, s.g, s.d, 12);
  TrainOptions opts;
  opts.checkpoint_dir = dir.path();
  opts.config_text = "seed = 12\n";
  auto r = t.train(syn, real, opts);
  ASSERT_TRUE(std::filesystem::exists(dir / "stage1_last.ckpt"));
  ASSERT_TRUE(std::filesystem::exists(dir / "stage1_best.ckpt"));
  auto ck = load_checkpoint(dir / "stage1_last.ckpt");
  EXPECT_EQ(ck.stage, "stage1");
  EXPECT_EQ(ck.epoch, 2u);
  EXPECT_EQ(ck.step, r.history.size());
  EXPECT_EQ(ck.config, "seed = 12\n");

  auto more = s;
  more.cfg.epochs = 3;
  Stage1Trainer resumed(more.cfg, more.g, more.d, 12);
  resumed.resume(ck);
  EXPECT_EQ(parameter_hash(resumed.generator()), parameter_hash(t.generator()));
  EXPECT_EQ(parameter_hash(resumed.discriminator()), parameter_hash(t.discriminator()));
  auto r2 = resumed.train(syn, real);
  EXPECT_EQ(r2.first_epoch, 2u);
  EXPECT_EQ(r2.epochs_run, 1u);
  EXPECT_EQ(r2.history.front().step, r.history.size());

  auto wrong = s;
  wrong.g.width = 4;
  Stage1Trainer other(wrong.cfg, wrong.g, wrong.d, 12);
  EXPECT_THROW(other.resume(ck), ShapeError);
}

TEST(Checkpoint, FileRoundTrip) {
  oracle::TempDir dir("ckfile");
  Checkpoint c;
  c.stage = "stage1";
  c.seed = 77;
  c.step = 5;
  c.epoch = 2;
  c.rng_state = "1 2 3";
  c.config = "a = 1\n";
  c.text["k"] = "v";
  c.sections["g1"] = {{"w", Tensor<float>({1, 2, 1, 3}, std::vector<float>{1, 2, 3, 4, 5, 6})}};
  save_checkpoint(dir / "x.ckpt", c);
  auto back = load_checkpoint(dir / "x.ckpt");
  EXPECT_EQ(back.stage, c.stage);
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.step, 5u);
  EXPECT_EQ(back.rng_state, c.rng_state);
  EXPECT_EQ(back.text, c.text);
  ASSERT_EQ(back.section("g1").size(), 1u);
  EXPECT_EQ(back.section("g1")[0].value, c.sections["g1"][0].value);
  EXPECT_THROW(back.section("d1"), Error);
  std::ofstream(dir / "bad.ckpt") << "garbage";
  EXPECT_THROW(load_checkpoint(dir / "bad.ckpt"), Error);
}

TEST(Stage2, FrozenRefinerAndScheduleInHistory) {
  auto s1 = small_stage1();
  RefinerG1<float> g1(s1.g);
  g1.init(3);
  const auto before = parameter_hash(g1);
  auto s = small_stage2();
  s.cfg.decay_every = 1;
  Stage2Trainer t(s.cfg, s.g, s.d, g1, 4);
  auto syn = random_batch(20, 16, 1), real = random_batch(12, 64, 2);
  auto r = t.train(syn, real);
  EXPECT_EQ(parameter_hash(g1), before);
  EXPECT_EQ(r.history.size(), 2u * 3u * 2u);
  for (const auto& h : r.history) {
    EXPECT_TRUE(std::isfinite(h.loss_g) && std::isfinite(h.loss_d));
    EXPECT_EQ(h.learning_rate, h.epoch == 0 ? 0.0002 : 0.0001);
  }
  auto ck = t.checkpoint();
  EXPECT_EQ(ck.text.at("g1_hash"), before);
}

TEST(Stage2, ResumeRejectsDifferentRefiner) {
  auto s1 = small_stage1();
  RefinerG1<float> g1(s1.g), other(s1.g);
  g1.init(3);
  other.init(4);
  auto s = small_stage2();
  Stage2Trainer t(s.cfg, s.g, s.d, g1, 4);
  auto ck = t.checkpoint();
  Stage2Trainer u(s.cfg, s.g, s.d, other, 4);
  EXPECT_THROW(u.resume(ck), ValidationError);
}

TEST(Stage2, Deterministic) {
  auto s1 = small_stage1();
  RefinerG1<float> g1(s1.g);
  g1.init(3);
  auto s = small_stage2();
  auto syn = random_batch(16, 16, 1), real = random_batch(8, 64, 2);
  Stage2Trainer a(s.cfg, s.g, s.d, g1, 6), b(s.cfg, s.g, s.d, g1, 6);
  EXPECT_EQ(a.train(syn, real).history, b.train(syn, real).history);
  EXPECT_EQ(parameter_hash(a.generator()), parameter_hash(b.generator()));
}
