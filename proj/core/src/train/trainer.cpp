#include "ivusim/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "ivusim/train/corpus.hpp"
#include "ivusim/util/format.hpp"
#include "ivusim/util/seed.hpp"

namespace fs = std::filesystem;

namespace ivusim::train {
namespace {

constexpr std::uint64_t kInitGStream = 10;
constexpr std::uint64_t kInitDStream = 11;
constexpr std::uint64_t kHistoryStream = 12;
constexpr std::uint64_t kLoopStream = 13;

std::string rng_text(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void rng_restore(std::mt19937_64& rng, const std::string& text) {
  std::istringstream is(text);
  is >> rng;
  if (!is) throw Error("checkpoint: corrupt RNG state");
}

nn::Tensor<float> slice(const nn::Tensor<float>& t, std::size_t begin, std::size_t end) {
  std::vector<std::size_t> idx(end - begin);
  std::iota(idx.begin(), idx.end(), begin);
  return gather(t, idx);
}

/// Calls f(begin, end) over consecutive chunks of n items.
template <typename F>
void for_chunks(std::size_t n, std::size_t micro, F&& f) {
  const std::size_t step = micro == 0 ? n : std::min(micro, n);
  for (std::size_t b = 0; b < n; b += step) f(b, std::min(n, b + step));
}

/// Forward pass without keeping anything for backward beyond one chunk.
/// Batch statistics are used, running statistics are left alone.
template <typename Net>
nn::Tensor<float> forward_detached(Net& net, const nn::Tensor<float>& x, std::size_t micro) {
  if (micro == 0 || micro >= x.shape().n) return net.forward(x, nn::Mode::kTrainFrozenStats);
  nn::Tensor<float> out;
  std::size_t filled = 0;
  for_chunks(x.shape().n, micro, [&](std::size_t b, std::size_t e) {
    auto y = net.forward(slice(x, b, e), nn::Mode::kTrainFrozenStats);
    if (out.empty()) {
      auto s = y.shape();
      s.n = x.shape().n;
      out = nn::Tensor<float>(s);
    }
    std::copy(y.data(), y.data() + y.size(), out.sample(filled));
    filled += e - b;
  });
  return out;
}

double d_step(nn::Network<float>& d, Adam<float>& opt, const nn::Tensor<float>& fake,
              const nn::Tensor<float>& real, std::size_t micro, double lr) {
  d.zero_grad();
  double loss = 0.0;
  // Fake and real chunks are paired by position; uneven counts are allowed.
  const std::size_t chunks = micro == 0 ? 1
                                        : (std::max(fake.shape().n, real.shape().n) + micro - 1) / micro;
  for (std::size_t k = 0; k < chunks; ++k) {
    auto part = [&](const nn::Tensor<float>& t) {
      const std::size_t n = t.shape().n;
      const std::size_t b = n * k / chunks;
      const std::size_t e = n * (k + 1) / chunks;
      return chunks == 1 ? t : slice(t, b, e);
    };
    loss += d_loss_and_gradient<float>(d, part(fake), part(real), nn::Mode::kTrain);
  }
  opt.step(lr);
  d.zero_grad();
  return loss;
}

template <typename Trainer>
TrainResult run_epochs(Trainer& t, const nn::Tensor<float>& inputs, const nn::Tensor<float>& real,
                       const TrainOptions& opts) {
  if (inputs.shape().n == 0 || real.shape().n == 0) {
    throw ValidationError(std::string(Trainer::kStage) + ": training corpora must be non-empty");
  }
  TrainResult r;
  r.first_epoch = t.next_epoch();
  r.gradient_accumulation = t.micro_batch() > 0 && t.micro_batch() < t.batch_size();
  double best = std::numeric_limits<double>::infinity();
  const std::string stage = Trainer::kStage;

  for (std::size_t e = t.next_epoch(); e < t.epochs(); ++e) {
    const double lr = t.learning_rate(e);
    auto batches = epoch_batches(inputs.shape().n, t.batch_size(), t.rng());
    if (opts.max_iterations_per_epoch > 0 && batches.size() > opts.max_iterations_per_epoch) {
      batches.resize(opts.max_iterations_per_epoch);
    }
    const auto n_real = real.shape().n;
    auto real_order = epoch_batches(n_real, n_real, t.rng()).front();
    std::size_t real_pos = 0;
    double sum_g = 0.0;
    double sum_d = 0.0;

    for (const auto& idx : batches) {
      const auto x = gather(inputs, idx);
      std::vector<std::size_t> ridx;
      while (ridx.size() < idx.size()) {
        if (real_pos == real_order.size()) {
          real_order = epoch_batches(n_real, n_real, t.rng()).front();
          real_pos = 0;
        }
        ridx.push_back(real_order[real_pos++]);
      }
      const auto y = gather(real, ridx);
      try {
        LossRecord rd{t.step_counter()++, e, Phase::kDiscriminator, 0.0, 0.0, 0.0, lr};
        rd.loss_d = t.discriminator_step(x, y, lr);
        r.history.push_back(rd);
        if (opts.on_record) opts.on_record(rd);
        LossRecord rg{t.step_counter()++, e, Phase::kGenerator, 0.0, 0.0, 0.0, lr};
        const auto gl = t.generator_step(x, lr);
        rg.loss_g = gl.total;
        rg.loss_reg = gl.reg;
        r.history.push_back(rg);
        if (opts.on_record) opts.on_record(rg);
        sum_d += rd.loss_d;
        sum_g += rg.loss_g;
      } catch (const TrainingDiverged& err) {
        std::string msg = stage + " epoch " + std::to_string(e) + " step " +
                          std::to_string(t.step_counter()) + ": " + err.what();
        if (!opts.checkpoint_dir.empty()) {
          msg += "; last good checkpoint kept at " + (opts.checkpoint_dir / (stage + "_last.ckpt")).string();
        }
        throw TrainingDiverged(msg);
      }
    }

    t.next_epoch() = e + 1;
    ++r.epochs_run;
    const double mean_g = sum_g / static_cast<double>(batches.size());
    const double mean_d = sum_d / static_cast<double>(batches.size());
    const bool improved = mean_g < best;
    if (improved) {
      best = mean_g;
      r.best_loss_g = mean_g;
      r.best_epoch = e;
    }
    if (!opts.checkpoint_dir.empty()) {
      const auto ckpt = t.checkpoint(opts.config_text);
      save_checkpoint(opts.checkpoint_dir / (stage + "_last.ckpt"), ckpt);
      if (improved) save_checkpoint(opts.checkpoint_dir / (stage + "_best.ckpt"), ckpt);
    }
    if (opts.on_epoch) opts.on_epoch(e, mean_g, mean_d);
  }
  return r;
}

void check_stage(const Checkpoint& c, const char* stage) {
  if (c.stage != stage) {
    throw ValidationError("checkpoint is for " + c.stage + ", expected " + stage);
  }
}

}  // namespace

void write_loss_history(const fs::path& path, const std::vector<LossRecord>& history) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << "# step\tepoch\tphase\tloss_g\tloss_d\tloss_reg\tlr\n";
  for (const auto& r : history) {
    os << r.step << '\t' << r.epoch << '\t' << static_cast<char>(r.phase) << '\t'
       << format_double(r.loss_g) << '\t' << format_double(r.loss_d) << '\t'
       << format_double(r.loss_reg) << '\t' << format_double(r.learning_rate) << '\n';
  }
}

// Stage I

Stage1Trainer::Stage1Trainer(Stage1Config cfg, const nn::RefinerConfig& g,
                             const nn::Discriminator1Config& d, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      seed_(seed),
      g_(g),
      d_(d),
      opt_g_((g_.init(derive_seed(seed, kInitGStream, 1)), g_.parameters()), cfg_.adam),
      opt_d_((d_.init(derive_seed(seed, kInitDStream, 1)), d_.parameters()), cfg_.adam),
      history_(cfg_.history_batches * cfg_.batch_size, derive_seed(seed, kHistoryStream, 1)),
      rng_(derive_seed(seed, kLoopStream, 1)) {
  cfg_.validate();
  if (g.image_size != d.image_size) throw ValidationError("stage1: G_I and D_I image sizes differ");
}

double Stage1Trainer::discriminator_step(const nn::Tensor<float>& x, const nn::Tensor<float>& real,
                                         double lr) {
  const auto refined = forward_detached(g_, x, cfg_.micro_batch);
  const auto mixed = mix_with_history(refined, history_);
  history_.push(refined);
  return d_step(d_, opt_d_, mixed, real, cfg_.micro_batch, lr);
}

GeneratorLoss Stage1Trainer::generator_step(const nn::Tensor<float>& x, double lr) {
  g_.zero_grad();
  d_.zero_grad();
  GeneratorLoss total;
  const double norm = static_cast<double>(x.shape().n);
  for_chunks(x.shape().n, cfg_.micro_batch, [&](std::size_t b, std::size_t e) {
    const auto part = (b == 0 && e == x.shape().n) ? x : slice(x, b, e);
    const auto l = g1_loss_and_gradient<float>(g_, d_, part, cfg_.lambda, norm, nn::Mode::kTrain);
    total.total += l.total;
    total.adversarial += l.adversarial;
    total.reg += l.reg;
  });
  opt_g_.step(lr);
  d_.zero_grad();
  return total;
}

TrainResult Stage1Trainer::train(const nn::Tensor<float>& synthetic, const nn::Tensor<float>& real,
                                 const TrainOptions& opts) {
  return run_epochs(*this, synthetic, real, opts);
}

Checkpoint Stage1Trainer::checkpoint(const std::string& config_text) {
  Checkpoint c;
  c.stage = kStage;
  c.seed = seed_;
  c.step = step_;
  c.epoch = epoch_;
  c.rng_state = rng_text(rng_);
  c.config = config_text;
  c.sections["g1"] = snapshot(g_);
  c.sections["d1"] = snapshot(d_);
  c.sections["g1.adam"] = snapshot(opt_g_);
  c.sections["d1.adam"] = snapshot(opt_d_);
  c.text["g1_hash"] = parameter_hash(g_);
  return c;
}

void Stage1Trainer::resume(const Checkpoint& c) {
  check_stage(c, kStage);
  restore(g_, c.section("g1"));
  restore(d_, c.section("d1"));
  restore(opt_g_, c.section("g1.adam"));
  restore(opt_d_, c.section("d1.adam"));
  rng_restore(rng_, c.rng_state);
  seed_ = c.seed;
  step_ = c.step;
  epoch_ = c.epoch;
}

// Stage II

Stage2Trainer::Stage2Trainer(Stage2Config cfg, const nn::Generator2Config& g,
                             const nn::Discriminator2Config& d, nn::RefinerG1<float>& g1,
                             std::uint64_t seed)
    : cfg_(std::move(cfg)),
      seed_(seed),
      g1_(g1),
      g_(g),
      d_(d),
      opt_g_((g_.init(derive_seed(seed, kInitGStream, 2)), g_.parameters()), cfg_.adam),
      opt_d_((d_.init(derive_seed(seed, kInitDStream, 2)), d_.parameters()), cfg_.adam),
      history_(cfg_.history_batches * cfg_.batch_size, derive_seed(seed, kHistoryStream, 2)),
      rng_(derive_seed(seed, kLoopStream, 2)) {
  cfg_.validate();
  if (g.output_size() != d.image_size) throw ValidationError("stage2: G_II output and D_II input sizes differ");
}

nn::Tensor<float> Stage2Trainer::refine_inputs(const nn::Tensor<float>& synthetic) {
  nn::Tensor<float> out(synthetic.shape());
  const std::size_t chunk = cfg_.micro_batch > 0 ? cfg_.micro_batch : cfg_.batch_size;
  for_chunks(synthetic.shape().n, chunk, [&](std::size_t b, std::size_t e) {
    const auto y = g1_.forward(slice(synthetic, b, e), nn::Mode::kInference);
    std::copy(y.data(), y.data() + y.size(), out.sample(b));
  });
  return out;
}

double Stage2Trainer::discriminator_step(const nn::Tensor<float>& low, const nn::Tensor<float>& real,
                                         double lr) {
  const auto fake = forward_detached(g_, low, cfg_.micro_batch);
  const auto mixed = mix_with_history(fake, history_);
  history_.push(fake);
  return d_step(d_, opt_d_, mixed, real, cfg_.micro_batch, lr);
}

GeneratorLoss Stage2Trainer::generator_step(const nn::Tensor<float>& low, double lr) {
  g_.zero_grad();
  d_.zero_grad();
  GeneratorLoss total;
  for_chunks(low.shape().n, cfg_.micro_batch, [&](std::size_t b, std::size_t e) {
    const auto part = (b == 0 && e == low.shape().n) ? low : slice(low, b, e);
    total.adversarial += g2_loss_and_gradient<float>(g_, d_, part);
  });
  total.total = total.adversarial;
  opt_g_.step(lr);
  d_.zero_grad();
  return total;
}

TrainResult Stage2Trainer::train(const nn::Tensor<float>& synthetic, const nn::Tensor<float>& real,
                                 const TrainOptions& opts) {
  const auto low = refine_inputs(synthetic);
  return run_epochs(*this, low, real, opts);
}

Checkpoint Stage2Trainer::checkpoint(const std::string& config_text) {
  Checkpoint c;
  c.stage = kStage;
  c.seed = seed_;
  c.step = step_;
  c.epoch = epoch_;
  c.rng_state = rng_text(rng_);
  c.config = config_text;
  c.sections["g1"] = snapshot(g1_);
  c.sections["g2"] = snapshot(g_);
  c.sections["d2"] = snapshot(d_);
  c.sections["g2.adam"] = snapshot(opt_g_);
  c.sections["d2.adam"] = snapshot(opt_d_);
  c.text["g1_hash"] = parameter_hash(g1_);
  c.text["g2_hash"] = parameter_hash(g_);
  return c;
}

void Stage2Trainer::resume(const Checkpoint& c) {
  check_stage(c, kStage);
  if (c.text.contains("g1_hash") && c.text.at("g1_hash") != parameter_hash(g1_)) {
    throw ValidationError("stage2 resume: checkpoint was trained on a different G_I");
  }
  restore(g_, c.section("g2"));
  restore(d_, c.section("d2"));
  restore(opt_g_, c.section("g2.adam"));
  restore(opt_d_, c.section("d2.adam"));
  rng_restore(rng_, c.rng_state);
  seed_ = c.seed;
  step_ = c.step;
  epoch_ = c.epoch;
}

std::unique_ptr<nn::RefinerG1<float>> load_refiner(const Checkpoint& ckpt, const nn::RefinerConfig& cfg) {
  auto g = std::make_unique<nn::RefinerG1<float>>(cfg);
  restore(*g, ckpt.section("g1"));
  return g;
}

}  // namespace ivusim::train
