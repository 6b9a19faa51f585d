#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "ivusim/eval/divergence.hpp"
#include "ivusim/eval/reports.hpp"
#include "ivusim/eval/vtt.hpp"
#include "ivusim/imaging/image_io.hpp"
#include "support/oracles.hpp"

using namespace ivusim;
using namespace ivusim::eval;

namespace {

std::vector<double> random_pmf(std::size_t n, std::uint64_t seed, double zero_fraction = 0.2) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> p(n);
  double s = 0;
  for (auto& v : p) {
    v = u(rng) < zero_fraction ? 0.0 : u(rng);
    s += v;
  }
  for (auto& v : p) v /= s;
  return p;
}

PolarLabelMask three_bands(std::size_t n) {
  PolarLabelMask m{Grid<TissueClass>(n, n, TissueClass::kExterna)};
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (r < n / 3) m.labels(r, c) = TissueClass::kLumen;
      else if (r < 2 * n / 3) m.labels(r, c) = TissueClass::kMedia;
  return m;
}

struct Corpus {
  std::vector<PolarImage> images;
  std::vector<PolarLabelMask> masks;
  AnnotatedSet set(const std::string& name) const { return {name, images, masks}; }
};

Corpus noisy_corpus(std::size_t count, std::uint64_t seed, double offset) {
  Corpus c;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 0.08);
  for (std::size_t i = 0; i < count; ++i) {
    auto m = three_bands(24);
    PolarImage img(24, 24);
    for (std::size_t k = 0; k < img.grid().size(); ++k) {
      double base = 0.2 + 0.25 * static_cast<int>(m.labels.values()[k]) + offset;
      img.grid().values()[k] = std::clamp(base + g(rng), 0.0, 1.0);
    }
    c.images.push_back(img);
    c.masks.push_back(m);
  }
  return c;
}

}  // namespace

TEST(Pmf, ConstantRegionHitsOneBin) {
  PolarImage img(12, 12, 0.5);
  auto pmf = region_pmf(img, three_bands(12), TissueClass::kMedia);
  EXPECT_EQ(pmf.n_pixels, 48u);
  EXPECT_EQ(pmf.mass[128], 1.0);
  EXPECT_EQ(intensity_bin(0.0), 0u);
  EXPECT_EQ(intensity_bin(1.0), 255u);
  EXPECT_EQ(intensity_bin(-3.0), 0u);
  EXPECT_EQ(intensity_bin(0.999), 255u);
}

TEST(Pmf, UniformPixelsSpreadEvenly) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  PolarImage img(400, 400);
  for (auto& v : img.grid().values()) v = u(rng);
  PolarLabelMask all{Grid<TissueClass>(400, 400, TissueClass::kLumen)};
  auto pmf = region_pmf(img, all, TissueClass::kLumen);
  double total = 0;
  for (double m : pmf.mass) {
    EXPECT_LT(m, 3.0 / 256);
    total += m;
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(Pmf, ClassesPartitionThePixels) {
  auto c = noisy_corpus(1, 3, 0.0);
  RegionHistograms h;
  h.add(c.images[0], c.masks[0]);
  EXPECT_EQ(h.count(TissueClass::kLumen) + h.count(TissueClass::kMedia) + h.count(TissueClass::kExterna), 24u * 24u);
}

TEST(Pmf, EmptyRegionNamesTheClass) {
  PolarImage img(8, 8, 0.3);
  PolarLabelMask m{Grid<TissueClass>(8, 8, TissueClass::kLumen)};
  try {
    region_pmf(img, m, TissueClass::kExterna);
    FAIL() << "expected an error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("externa"), std::string::npos);
  }
  PolarImage bad(8, 8, 0.3);
  bad(0, 0) = NAN;
  RegionHistograms h;
  EXPECT_THROW(h.add(bad, m), ValidationError);
  EXPECT_THROW(h.add(PolarImage(4, 8), m), ShapeError);
}

TEST(Js, Properties) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto p = random_pmf(256, s), q = random_pmf(256, s + 1000);
    double pq = js_divergence(p, q), qp = js_divergence(q, p);
    EXPECT_EQ(pq, qp);
    EXPECT_GE(pq, 0.0);
    EXPECT_LE(pq, 1.0);
    EXPECT_GT(pq, 1e-12);
    EXPECT_LT(js_divergence(p, p), 1e-12);
    EXPECT_NEAR(pq, oracle::js_bits(p, q), 1e-12);
  }
  std::vector<double> a(256, 0.0), b(256, 0.0);
  a[3] = 1.0;
  b[200] = 1.0;
  EXPECT_EQ(js_divergence(a, b), 1.0);
  EXPECT_THROW(js_divergence(a, std::vector<double>(10, 0.1)), ValidationError);
}

TEST(Reports, IdenticalCorporaGiveZero) {
  auto c = noisy_corpus(40, 1, 0.0);
  auto row = table1_row(c.set("real"), c.set("copy"), 30, 7);
  for (double v : row.js) EXPECT_EQ(v, 0.0);
}

TEST(Reports, SingleIntensityGivesZeroBetweenClasses) {
  Corpus c;
  for (int i = 0; i < 5; ++i) {
    c.images.emplace_back(24, 24, 0.4);
    c.masks.push_back(three_bands(24));
  }
  auto row = table2_row(c.set("flat"), 5, 1);
  for (double v : row.js) EXPECT_EQ(v, 0.0);
}

TEST(Reports, PooledOverSampledImagesMatchesOracle) {
  auto real = noisy_corpus(40, 1, 0.0), sim = noisy_corpus(35, 2, 0.05);
  const std::size_t n = 30;
  auto row = table1_row(real.set("real"), sim.set("sim"), n, 9);
  auto idx_r = sample_indices(40, n, 9), idx_s = sample_indices(35, n, 9);
  std::set<std::size_t> distinct(idx_r.begin(), idx_r.end());
  EXPECT_EQ(distinct.size(), n);
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<double> p(256, 0), q(256, 0);
    double np = 0, nq = 0;
    for (auto i : idx_r)
      for (std::size_t k = 0; k < 24 * 24; ++k)
        if (static_cast<std::size_t>(real.masks[i].labels.values()[k]) == c) {
          p[std::min<std::size_t>(255, static_cast<std::size_t>(real.images[i].grid().values()[k] * 256))] += 1;
          np += 1;
        }
    for (auto i : idx_s)
      for (std::size_t k = 0; k < 24 * 24; ++k)
        if (static_cast<std::size_t>(sim.masks[i].labels.values()[k]) == c) {
          q[std::min<std::size_t>(255, static_cast<std::size_t>(sim.images[i].grid().values()[k] * 256))] += 1;
          nq += 1;
        }
    for (auto& v : p) v /= np;
    for (auto& v : q) v /= nq;
    EXPECT_NEAR(row.js[c], oracle::js_bits(p, q), 1e-12);
  }
}

TEST(Reports, DeterministicAndBounded) {
  auto real = noisy_corpus(40, 1, 0.0), a = noisy_corpus(40, 2, 0.1), b = noisy_corpus(40, 3, -0.1);
  std::vector<AnnotatedSet> sims{a.set("a"), b.set("b")};
  auto r1 = divergence_report(real.set("real"), sims, 30, 4);
  auto r2 = divergence_report(real.set("real"), sims, 30, 4);
  EXPECT_EQ(format_report_text(r1), format_report_text(r2));
  EXPECT_EQ(format_report_tsv(r1), format_report_tsv(r2));
  ASSERT_EQ(r1.table1.size(), 2u);
  ASSERT_EQ(r1.table2.size(), 3u);
  EXPECT_EQ(r1.table2[0].source, "real");
  for (const auto& row : r1.table1)
    for (double v : row.js) EXPECT_TRUE(v >= 0.0 && v <= 1.0);
  EXPECT_THROW(table1_row(real.set("real"), a.set("a"), 41, 1), ValidationError);
}

TEST(Vtt, StudyCountAndWilsonInterval) {
  auto s = wilson_score(147, 260);
  EXPECT_NEAR(s.accuracy, 0.5654, 5e-5);
  auto [lo, hi] = oracle::wilson(147, 260);
  EXPECT_NEAR(s.ci_low, lo, 1e-12);
  EXPECT_NEAR(s.ci_high, hi, 1e-12);
  EXPECT_EQ(wilson_score(10, 10).accuracy, 1.0);
}

TEST(Vtt, ScoringAndErrors) {
  std::vector<Side> key{Side::kLeft, Side::kRight, Side::kRight, Side::kLeft};
  EXPECT_EQ(vtt_score(key, key).accuracy, 1.0);
  std::vector<Side> half{Side::kLeft, Side::kLeft, Side::kRight, Side::kRight};
  EXPECT_EQ(vtt_score(key, half).correct, 2u);
  EXPECT_THROW(vtt_score(key, std::vector<Side>(3, Side::kLeft)), ValidationError);
}

TEST(Vtt, RandomRatersScoreOneHalf) {
  std::mt19937_64 rng(11);
  std::bernoulli_distribution coin(0.5);
  double total = 0;
  const int sessions = 10000;
  for (int s = 0; s < sessions; ++s) {
    auto plan = vtt_plan(30, 30, 26, rng());
    std::vector<Side> key, resp;
    for (const auto& p : plan) {
      key.push_back(p.real_side);
      resp.push_back(coin(rng) ? Side::kLeft : Side::kRight);
    }
    total += vtt_score(key, resp).accuracy;
  }
  EXPECT_NEAR(total / sessions, 0.5, 0.02);
}

TEST(Vtt, SidesAreBalancedAndPairsDistinct) {
  std::size_t left = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto plan = vtt_plan(50, 60, 40, seed);
    std::set<std::size_t> r, s;
    for (const auto& p : plan) {
      left += p.real_side == Side::kLeft;
      ++total;
      r.insert(p.real_index);
      s.insert(p.sim_index);
    }
    EXPECT_EQ(r.size(), 40u);
    EXPECT_EQ(s.size(), 40u);
  }
  EXPECT_NEAR(static_cast<double>(left) / total, 0.5, 0.02);
}

TEST(Vtt, ExportKeepsTruthOutOfPresentedFiles) {
  oracle::TempDir dir("vtt");
  std::vector<Grid<double>> real(6, Grid<double>(8, 8, 0.9)), sim(6, Grid<double>(8, 8, 0.1));
  auto plan = vtt_plan(6, 6, 6, 3);
  vtt_export(dir / "pairs", dir / "key.tsv", real, sim, plan);
  EXPECT_FALSE(std::filesystem::exists(dir / "pairs" / "key.tsv"));
  std::ifstream in(dir / "pairs" / "pairs.tsv");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(text.find("real"), std::string::npos);
  EXPECT_EQ(text.find("sim"), std::string::npos);
  auto key = read_sides(dir / "key.tsv", "real_side");
  ASSERT_EQ(key.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(key[i], plan[i].real_side);
    char name[32];
    std::snprintf(name, sizeof name, "pair_%04zu.png", i + 1);
    auto img = read_gray8(dir / "pairs" / name);
    double left = img(4, 2), right = img(4, img.cols() - 3);
    EXPECT_EQ(left > right, plan[i].real_side == Side::kLeft);
  }
}
