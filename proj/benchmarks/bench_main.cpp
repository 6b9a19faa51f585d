#include <benchmark/benchmark.h>

#include <random>

#include "ivusim/bmode/pseudo_bmode.hpp"
#include "ivusim/dataset/phantom.hpp"
#include "ivusim/imaging/scan_conversion.hpp"
#include "ivusim/nn/models.hpp"

using namespace ivusim;

namespace {

ScattererField noise_field(std::size_t n) {
  ScattererField f{Grid<double>(n, n)};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (auto& v : f.values.values()) v = g(rng);
  return f;
}

void BM_ConvolveRf(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto field = noise_field(n);
  const auto k = psf_kernel({});
  for (auto _ : state) benchmark::DoNotOptimize(convolve_rf(field, k));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n));
}
BENCHMARK(BM_ConvolveRf)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SimulateBmode(benchmark::State& state) {
  const auto ph = synth_phantom(3, PhantomParams{});
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(ph.echogenicity, BmodeParams{}, ++seed));
}
BENCHMARK(BM_SimulateBmode)->Unit(benchmark::kMillisecond);

void BM_PolarToCartesian(benchmark::State& state) {
  const auto ph = synth_phantom(4, PhantomParams{});
  const auto img = simulate(ph.echogenicity, BmodeParams{}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(polar_to_cartesian(img, 384));
}
BENCHMARK(BM_PolarToCartesian)->Unit(benchmark::kMillisecond);

void BM_RefinerForward(benchmark::State& state) {
  nn::RefinerConfig cfg;
  nn::RefinerG1<float> g(cfg);
  g.init(1);
  const auto batch = static_cast<std::size_t>(state.range(0));
  nn::Tensor<float> x({batch, 1, cfg.image_size, cfg.image_size});
  x.fill(0.5f);
  for (auto _ : state) benchmark::DoNotOptimize(g.forward(x, nn::Mode::kInference));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(batch));
}
BENCHMARK(BM_RefinerForward)->Arg(1)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
