#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ivusim/nn/models.hpp"

using namespace ivusim;
using namespace ivusim::nn;

namespace {

template <typename T>
Tensor<T> random_tensor(Shape s, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor<T> t(s);
  for (auto& v : t.values()) v = static_cast<T>(u(rng));
  return t;
}

template <typename T>
void zero_all(Network<T>& net) {
  for (auto* p : net.parameters()) p->value.fill(T(0));
}

double dot(const Tensor<double>& a, const Tensor<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.values()[i] * b.values()[i];
  return s;
}

double rel_err(double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-6}); }

/// Checks input and parameter gradients of loss = <w, layer(x)> by central
/// differences.
void check_layer(Layer<double>& layer, Tensor<double> x, Mode mode = Mode::kTrainFrozenStats) {
  auto y = layer.forward(x, mode);
  auto w = random_tensor<double>(y.shape(), 77, -1, 1);
  std::vector<Parameter<double>*> params;
  layer.collect_parameters(params);
  for (auto* p : params) p->grad.fill(0);
  auto gx = layer.backward(w);
  const double h = 1e-5;
  auto loss = [&] { return dot(layer.forward(x, mode), w); };
  for (std::size_t i = 0; i < x.size(); i += std::max<std::size_t>(1, x.size() / 40)) {
    double keep = x.values()[i];
    x.values()[i] = keep + h;
    double up = loss();
    x.values()[i] = keep - h;
    double dn = loss();
    x.values()[i] = keep;
    EXPECT_LT(rel_err((up - dn) / (2 * h), gx.values()[i]), 1e-5) << layer.kind() << " input " << i;
  }
  for (auto* p : params) {
    for (std::size_t i = 0; i < p->value.size(); i += std::max<std::size_t>(1, p->value.size() / 20)) {
      double keep = p->value.values()[i];
      p->value.values()[i] = keep + h;
      double up = loss();
      p->value.values()[i] = keep - h;
      double dn = loss();
      p->value.values()[i] = keep;
      EXPECT_LT(rel_err((up - dn) / (2 * h), p->grad.values()[i]), 1e-5) << p->name << " " << i;
    }
  }
}

void init_layer(Layer<double>& layer, std::uint64_t seed) {
  std::vector<Parameter<double>*> params;
  layer.collect_parameters(params);
  std::mt19937_64 rng(seed);
  init_parameters(params, rng);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (auto* p : params)
    for (auto& v : p->value.values()) v += u(rng);
}

}  // namespace

TEST(Layers, ConvGradient) {
  for (ConvSpec s : {ConvSpec{2, 3, 3, 1, 1}, ConvSpec{1, 2, 3, 2, 1}, ConvSpec{3, 2, 1, 1, 0}}) {
    Conv2d<double> conv(s, "c");
    init_layer(conv, 1);
    check_layer(conv, random_tensor<double>({2, s.in, 6, 6}, 2, -1, 1));
  }
}

TEST(Layers, ConvMatchesDirectSum) {
  Conv2d<double> conv({2, 3, 3, 1, 1}, "c");
  init_layer(conv, 4);
  auto x = random_tensor<double>({1, 2, 5, 5}, 5, -1, 1);
  auto y = conv.forward(x, Mode::kInference);
  const auto& w = conv.weight().value;
  for (std::size_t o = 0; o < 3; ++o) {
    for (long r = 0; r < 5; ++r) {
      for (long c = 0; c < 5; ++c) {
        double s = conv.bias().value.values()[o];
        for (std::size_t i = 0; i < 2; ++i)
          for (long kr = 0; kr < 3; ++kr)
            for (long kc = 0; kc < 3; ++kc) {
              long rr = r + kr - 1, cc = c + kc - 1;
              if (rr < 0 || cc < 0 || rr >= 5 || cc >= 5) continue;
              s += w.values()[o * 18 + i * 9 + kr * 3 + kc] * x(0, i, rr, cc);
            }
        EXPECT_NEAR(y(0, o, r, c), s, 1e-12);
      }
    }
  }
}

TEST(Layers, ActivationPoolingGradients) {
  Relu<double> leaky(0.2);
  check_layer(leaky, random_tensor<double>({2, 2, 4, 4}, 3, -1, 1));
  BoundedSigmoid<double> sig;
  check_layer(sig, random_tensor<double>({1, 1, 4, 4}, 4, -4, 4));
  MaxPool2<double> pool;
  check_layer(pool, random_tensor<double>({2, 2, 6, 6}, 5, -1, 1));
  Upsample2<double> up;
  check_layer(up, random_tensor<double>({1, 2, 3, 3}, 6, -1, 1));
  GlobalAvgPool<double> avg;
  check_layer(avg, random_tensor<double>({2, 3, 4, 4}, 7, -1, 1));
  Linear<double> fc(12, 3, "fc");
  init_layer(fc, 8);
  check_layer(fc, random_tensor<double>({2, 3, 2, 2}, 9, -1, 1));
}

TEST(Layers, BatchNormGradientAndStats) {
  BatchNorm2d<double> bn(3, "bn");
  init_layer(bn, 10);
  auto x = random_tensor<double>({4, 3, 3, 3}, 11, -2, 3);
  check_layer(bn, x);
  // Train mode normalizes with batch statistics.
  BatchNorm2d<double> fresh(3, "bn");
  auto y = fresh.forward(x, Mode::kTrain);
  for (std::size_t c = 0; c < 3; ++c) {
    double s = 0, sq = 0;
    for (std::size_t n = 0; n < 4; ++n)
      for (std::size_t i = 0; i < 9; ++i) {
        double v = y.values()[(n * 3 + c) * 9 + i];
        s += v;
        sq += v * v;
      }
    EXPECT_NEAR(s / 36, 0.0, 1e-12);
    EXPECT_NEAR(sq / 36, 1.0, 1e-3);
  }
  // Frozen-stats mode leaves the running statistics alone.
  std::vector<Tensor<double>*> buf;
  fresh.collect_buffers(buf);
  auto before = *buf[0];
  fresh.forward(x, Mode::kTrainFrozenStats);
  fresh.forward(x, Mode::kInference);
  EXPECT_EQ(*buf[0], before);
  fresh.forward(x, Mode::kTrain);
  EXPECT_NE(*buf[0], before);
}

TEST(Layers, SigmoidStaysInsideUnitInterval) {
  EXPECT_GT(BoundedSigmoid<float>::apply(-1e6f), 0.0f);
  EXPECT_LT(BoundedSigmoid<float>::apply(1e6f), 1.0f);
  EXPECT_GT(BoundedSigmoid<double>::apply(-1e6), 0.0);
  EXPECT_LT(BoundedSigmoid<double>::apply(1e6), 1.0);
  EXPECT_EQ(BoundedSigmoid<double>::apply(0.0), 0.5);
}

TEST(Layers, ResidualWithZeroBodyIsIdentity) {
  Sequential<double> body;
  body.add(std::make_unique<Conv2d<double>>(ConvSpec{3, 3, 3, 1, 1}, "a"));
  body.add(std::make_unique<Relu<double>>());
  body.add(std::make_unique<Conv2d<double>>(ConvSpec{3, 3, 3, 1, 1}, "b"));
  Residual<double> res(std::move(body));
  auto x = random_tensor<double>({2, 3, 5, 5}, 12, -1, 1);
  EXPECT_EQ(res.forward(x, Mode::kInference), x);
  init_layer(res, 13);
  check_layer(res, x);
}

TEST(Models, RefinerShapesAndZeroWeights) {
  RefinerG1<float> g({});
  g.init(1);
  auto x = random_tensor<float>({8, 1, 64, 64}, 1);
  auto y = g.forward(x, Mode::kInference);
  EXPECT_EQ(y.shape(), (Shape{8, 1, 64, 64}));
  zero_all(g);
  for (float v : g.forward(x, Mode::kInference).values()) EXPECT_EQ(v, 0.5f);
  EXPECT_THROW(g.forward(random_tensor<float>({1, 1, 32, 32}, 1), Mode::kInference), ShapeError);
  EXPECT_THROW(g.forward(random_tensor<float>({1, 2, 64, 64}, 1), Mode::kInference), ShapeError);
}

TEST(Models, RefinerParameterCount) {
  RefinerG1<float> g({});
  const std::size_t w = 64;
  std::size_t entry = 9 * w + w, block = 2 * (9 * w * w + w), exit = w + 1;
  EXPECT_EQ(count_params(g), entry + 4 * block + exit);
  Conv2d<float> single({1, 64, 3, 1, 1}, "c");
  EXPECT_EQ(count_params<float>(single), 640u);
  Sequential<float> empty;
  EXPECT_EQ(count_params<float>(empty), 0u);
}

TEST(Models, RandomDrawsStayFiniteAndBounded) {
  RefinerConfig gc;
  gc.image_size = 16;
  gc.width = 8;
  gc.blocks = 2;
  Discriminator1Config dc;
  dc.image_size = 16;
  dc.widths = {4, 8, 8, 8};
  RefinerG1<float> g(gc);
  DiscriminatorD1<float> d(dc);
  for (std::uint64_t s = 0; s < 100; ++s) {
    g.init(s);
    d.init(s + 1000);
    auto x = random_tensor<float>({2, 1, 16, 16}, s);
    auto y = g.forward(x, Mode::kInference);
    for (float v : y.values()) {
      ASSERT_TRUE(std::isfinite(v));
      ASSERT_GT(v, 0.0f);
      ASSERT_LT(v, 1.0f);
    }
    for (double p : probabilities(d.forward(y, Mode::kInference))) {
      ASSERT_GT(p, 0.0);
      ASSERT_LT(p, 1.0);
    }
  }
}

TEST(Models, DiscriminatorOneShapes) {
  DiscriminatorD1<float> d({});
  d.init(2);
  auto p = probabilities(d.forward(random_tensor<float>({8, 1, 64, 64}, 3), Mode::kInference));
  EXPECT_EQ(p.size(), 8u);
  zero_all(d);
  for (double v : probabilities(d.forward(random_tensor<float>({3, 1, 64, 64}, 4), Mode::kInference)))
    EXPECT_EQ(v, 0.5);
  Discriminator1Config patch;
  patch.per_patch = true;
  DiscriminatorD1<float> dp(patch);
  dp.init(3);
  auto logits = dp.forward(random_tensor<float>({2, 1, 64, 64}, 5), Mode::kInference);
  EXPECT_EQ(logits.shape().n, 2u);
  EXPECT_GT(logits.shape().h, 1u);
}

TEST(Models, GeneratorTwoShapesAndBottleneck) {
  Generator2Config cfg;
  cfg.width = 16;
  cfg.up_widths = {8, 8};
  GeneratorG2<float> g(cfg);
  g.init(5);
  Shape bottleneck;
  g.set_trace([&](std::string_view tag, const Shape& s) {
    if (tag == "bottleneck") bottleneck = s;
  });
  auto y = g.forward(random_tensor<float>({8, 1, 64, 64}, 6), Mode::kInference);
  EXPECT_EQ(y.shape(), (Shape{8, 1, 256, 256}));
  EXPECT_EQ(bottleneck.h, 16u);
  EXPECT_EQ(bottleneck.w, 16u);
  for (float v : y.values()) {
    ASSERT_GT(v, 0.0f);
    ASSERT_LT(v, 1.0f);
  }
  zero_all(g);
  g.set_trace({});
  for (float v : g.forward(random_tensor<float>({2, 1, 64, 64}, 7), Mode::kInference).values()) EXPECT_EQ(v, 0.5f);
}

TEST(Models, DiscriminatorTwoPreHeadIsFourByFour) {
  DiscriminatorD2<float> d({});
  d.init(6);
  Shape prehead;
  d.set_trace([&](std::string_view tag, const Shape& s) {
    if (tag == "prehead") prehead = s;
  });
  auto p = probabilities(d.forward(random_tensor<float>({4, 1, 256, 256}, 8), Mode::kInference));
  EXPECT_EQ(p.size(), 4u);
  EXPECT_EQ(prehead.h, 4u);
  EXPECT_EQ(prehead.w, 4u);
  zero_all(d);
  for (double v : probabilities(d.forward(random_tensor<float>({2, 1, 256, 256}, 9), Mode::kInference)))
    EXPECT_EQ(v, 0.5);
}

TEST(Models, InferenceIsDeterministicForAnyBatchSize) {
  Generator2Config cfg;
  cfg.input_size = 16;
  cfg.width = 8;
  cfg.blocks = 1;
  cfg.up_widths = {4, 4};
  GeneratorG2<float> g(cfg);
  g.init(7);
  auto x = random_tensor<float>({3, 1, 16, 16}, 10);
  auto a = g.forward(x, Mode::kInference);
  EXPECT_EQ(a, g.forward(x, Mode::kInference));
  for (std::size_t n = 1; n <= 3; ++n) {
    auto y = g.forward(random_tensor<float>({n, 1, 16, 16}, n), Mode::kInference);
    EXPECT_EQ(y.shape(), (Shape{n, 1, 64, 64}));
  }
}

TEST(Models, WholeNetworkGradientDouble) {
  Generator2Config cfg;
  cfg.input_size = 8;
  cfg.width = 3;
  cfg.blocks = 1;
  cfg.up_widths = {2, 2};
  GeneratorG2<double> g(cfg);
  g.init(8);
  auto x = random_tensor<double>({2, 1, 8, 8}, 11);
  auto y = g.forward(x, Mode::kTrainFrozenStats);
  auto w = random_tensor<double>(y.shape(), 12, -1, 1);
  g.zero_grad();
  g.backward(w);
  const double h = 1e-5;
  int checked = 0;
  for (auto* p : g.parameters()) {
    for (std::size_t i = 0; i < p->value.size(); i += 7) {
      double keep = p->value.values()[i];
      p->value.values()[i] = keep + h;
      double up = dot(g.forward(x, Mode::kTrainFrozenStats), w);
      p->value.values()[i] = keep - h;
      double dn = dot(g.forward(x, Mode::kTrainFrozenStats), w);
      p->value.values()[i] = keep;
      // Biases ahead of batch-stat normalization have zero gradient; the
      // difference quotient there is pure roundoff, of order 1e-16 * |f| / h.
      const double num = (up - dn) / (2 * h), ana = p->grad.values()[i];
      EXPECT_LT(std::fabs(num - ana), 1e-4 * std::max(std::fabs(num), std::fabs(ana)) + 1e-8) << p->name << " " << i;
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(Models, InitIsSeeded) {
  RefinerConfig c;
  c.width = 8;
  RefinerG1<float> a(c), b(c);
  a.init(3);
  b.init(3);
  auto pa = a.parameters(), pb = b.parameters();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i]->value, pb[i]->value);
  b.init(4);
  EXPECT_NE(pa[0]->value, b.parameters()[0]->value);
}
