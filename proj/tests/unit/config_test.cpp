#include <gtest/gtest.h>

#include <fstream>

#include "ivusim/run_config.hpp"
#include "ivusim/util/format.hpp"
#include "ivusim/util/hash.hpp"
#include "ivusim/util/manifest.hpp"
#include "ivusim/util/seed.hpp"
#include "support/oracles.hpp"

using namespace ivusim;

TEST(KvConfig, ParseMergeAndTypes) {
  auto a = KvConfig::parse("# comment\nseed = 4\nstage1.lambda=0.5\npsf.list = 1, 2.5,3\nflag = true\n");
  EXPECT_EQ(a.get_int("seed", 0), 4);
  EXPECT_EQ(a.get_double("stage1.lambda", 0.0), 0.5);
  EXPECT_EQ(a.get_doubles("psf.list", {}), (std::vector<double>{1, 2.5, 3}));
  EXPECT_TRUE(a.get_bool("flag", false));
  EXPECT_EQ(a.get_string("missing", "x"), "x");
  auto b = KvConfig::parse("seed = 9");
  a.merge(b);
  EXPECT_EQ(a.get_int("seed", 0), 9);
  EXPECT_THROW(KvConfig::parse("no equals sign"), ValidationError);
  EXPECT_THROW(KvConfig::parse("seed = abc").get_int("seed", 0), ValidationError);
}

TEST(KvConfig, UnknownKeysRejected) {
  auto kv = KvConfig::parse("seed = 1\nstage1.learning_rat = 0.1\n");
  try {
    RunConfig::from_kv(kv);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("stage1.learning_rat"), std::string::npos);
  }
}

TEST(RunConfig, DefaultsCarryTrainingHyperparameters) {
  auto cfg = RunConfig::from_kv({});
  EXPECT_EQ(cfg.stage1.learning_rate, 0.001);
  EXPECT_EQ(cfg.stage1.epochs, 20u);
  EXPECT_EQ(cfg.stage1.batch_size, 512u);
  EXPECT_EQ(cfg.stage1.lambda, 0.1);
  EXPECT_EQ(cfg.stage2.initial_learning_rate, 0.0002);
  EXPECT_EQ(cfg.stage2.decay, 0.5);
  EXPECT_EQ(cfg.stage2.decay_every, 100u);
  EXPECT_EQ(cfg.stage2.epochs, 1200u);
  EXPECT_EQ(cfg.stage2.batch_size, 64u);
  EXPECT_EQ(cfg.bmode.psf.f0, 0.25);
  EXPECT_EQ(cfg.bmode.dynamic_range_db, 40.0);
  EXPECT_EQ(cfg.echogenicity[TissueClass::kMedia].mean, 0.35);
  EXPECT_EQ(cfg.eval_images, 30u);
  EXPECT_EQ(cfg.g1.width, 64u);
  EXPECT_EQ(cfg.g1.blocks, 4u);
}

TEST(RunConfig, RoundTripThroughText) {
  auto kv = KvConfig::parse("seed = 77\nstage1.lambda = 0.3\npsf.f0 = 0.2\ng1.width = 16\nd1.widths = 8,8,8,8\n"
                            "dataset.test_patients = 3,9\necho.media_mean = 0.4\n");
  auto cfg = RunConfig::from_kv(kv);
  EXPECT_EQ(cfg.seed, 77u);
  EXPECT_EQ(cfg.stage1.lambda, 0.3);
  EXPECT_EQ(cfg.g1.width, 16u);
  EXPECT_EQ(cfg.test_patients, (std::set<std::string>{"3", "9"}));
  EXPECT_EQ(cfg.phantom.echogenicity[TissueClass::kMedia].mean, 0.4);
  auto text = cfg.to_kv().to_string();
  auto again = RunConfig::from_kv(KvConfig::parse(text));
  EXPECT_EQ(again.to_kv().to_string(), text);
  for (const auto& key : RunConfig::keys()) EXPECT_TRUE(cfg.to_kv().contains(key)) << key;
}

TEST(RunConfig, InvalidValuesRejected) {
  EXPECT_THROW(RunConfig::from_kv(KvConfig::parse("stage2.decay = 1.5")), ValidationError);
  EXPECT_THROW(RunConfig::from_kv(KvConfig::parse("stage1.batch_size = 0")), ValidationError);
  EXPECT_THROW(RunConfig::from_kv(KvConfig::parse("psf.sigma_axial = 0")), ValidationError);
}

TEST(Manifest, SaveLoadAndPaths) {
  oracle::TempDir dir("manifest");
  Manifest m({"id", "image"});
  m.add_row({"a", "images/a.png"});
  m.add_row({"b", "/abs/b.png"});
  EXPECT_THROW(m.add_row({"c"}), ValidationError);
  EXPECT_THROW(m.add_row({"c\t", "x"}), ValidationError);
  m.save(dir / "m.tsv");
  auto back = Manifest::load(dir / "m.tsv");
  EXPECT_EQ(back.size(), 2u);
  EXPECT_EQ(back.at(0, "id"), "a");
  EXPECT_EQ(back.path_at(0, "image"), dir / "images/a.png");
  EXPECT_EQ(back.path_at(1, "image"), std::filesystem::path("/abs/b.png"));
  EXPECT_FALSE(back.has_column("mask"));
}

TEST(Util, ShortestRoundTripFormatting) {
  for (double v : {0.1, 1e-4, 2.0 / 3.0, 123456.789, 5e-5}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.0002), "0.0002");
  EXPECT_EQ(format_fixed(0.56538, 4), "0.5654");
}

TEST(Util, Sha256KnownVector) {
  Sha256 h;
  h.update(std::string_view("abc"));
  EXPECT_EQ(h.finish(), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Util, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t stream = 0; stream < 8; ++stream)
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, stream, i));
  EXPECT_EQ(seen.size(), 8000u);
  static_assert(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
}
