#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ivusim/nn/models.hpp"
#include "ivusim/train/adam.hpp"
#include "ivusim/train/checkpoint.hpp"
#include "ivusim/train/config.hpp"
#include "ivusim/train/history_buffer.hpp"
#include "ivusim/train/losses.hpp"

namespace ivusim::train {

enum class Phase : char { kDiscriminator = 'D', kGenerator = 'G' };

/// One optimizer step. Fields that do not apply to the phase are 0.
struct LossRecord {
  std::uint64_t step = 0;
  std::size_t epoch = 0;
  Phase phase = Phase::kDiscriminator;
  double loss_g = 0.0;
  double loss_d = 0.0;
  double loss_reg = 0.0;
  double learning_rate = 0.0;

  friend bool operator==(const LossRecord&, const LossRecord&) = default;
};

void write_loss_history(const std::filesystem::path& path, const std::vector<LossRecord>& history);

struct TrainOptions {
  /// Where `<stage>_last.ckpt` (every epoch) and `<stage>_best.ckpt` go;
  /// empty disables checkpointing.
  std::filesystem::path checkpoint_dir;
  /// Caps iterations per epoch for smoke runs; 0 runs full epochs.
  std::size_t max_iterations_per_epoch = 0;
  /// Stored verbatim in every checkpoint.
  std::string config_text;
  std::function<void(const LossRecord&)> on_record;
  std::function<void(std::size_t epoch, double mean_loss_g, double mean_loss_d)> on_epoch;
};

struct TrainResult {
  std::vector<LossRecord> history;
  std::size_t first_epoch = 0;
  std::size_t epochs_run = 0;
  double best_loss_g = 0.0;
  std::size_t best_epoch = 0;
  /// True when micro-batches split each batch (accumulated gradients).
  bool gradient_accumulation = false;
};

/// Stage I: refiner G_I against D_I on 64x64 polar images.
class Stage1Trainer {
 public:
  static constexpr const char* kStage = "stage1";

  Stage1Trainer(Stage1Config cfg, const nn::RefinerConfig& g, const nn::Discriminator1Config& d,
                std::uint64_t seed);

  /// Refines x with the current G_I, mixes with history, updates only phi_I.
  double discriminator_step(const nn::Tensor<float>& x, const nn::Tensor<float>& real, double lr);
  /// Updates only theta_I.
  GeneratorLoss generator_step(const nn::Tensor<float>& x, double lr);
  double learning_rate(std::size_t) const { return cfg_.learning_rate; }
  std::size_t epochs() const { return cfg_.epochs; }
  std::size_t batch_size() const { return cfg_.batch_size; }
  std::size_t micro_batch() const { return cfg_.micro_batch; }

  TrainResult train(const nn::Tensor<float>& synthetic, const nn::Tensor<float>& real,
                    const TrainOptions& opts = {});

  Checkpoint checkpoint(const std::string& config_text = {});
  void resume(const Checkpoint& ckpt);

  nn::RefinerG1<float>& generator() { return g_; }
  nn::DiscriminatorD1<float>& discriminator() { return d_; }
  std::mt19937_64& rng() { return rng_; }
  std::uint64_t& step_counter() { return step_; }
  std::size_t& next_epoch() { return epoch_; }

 private:
  Stage1Config cfg_;
  std::uint64_t seed_;
  nn::RefinerG1<float> g_;
  nn::DiscriminatorD1<float> d_;
  Adam<float> opt_g_;
  Adam<float> opt_d_;
  HistoryBuffer history_;
  std::mt19937_64 rng_;
  std::uint64_t step_ = 0;
  std::size_t epoch_ = 0;
};

/// Stage II: G_II on top of a frozen G_I, against D_II on 256x256 images.
class Stage2Trainer {
 public:
  static constexpr const char* kStage = "stage2";

  /// `g1` is only ever run in inference mode and is never written.
  Stage2Trainer(Stage2Config cfg, const nn::Generator2Config& g, const nn::Discriminator2Config& d,
                nn::RefinerG1<float>& g1, std::uint64_t seed);

  /// `low` is already refined by G_I.
  double discriminator_step(const nn::Tensor<float>& low, const nn::Tensor<float>& real, double lr);
  GeneratorLoss generator_step(const nn::Tensor<float>& low, double lr);
  double learning_rate(std::size_t epoch) const { return cfg_.learning_rate(epoch); }
  std::size_t epochs() const { return cfg_.epochs; }
  std::size_t batch_size() const { return cfg_.batch_size; }
  std::size_t micro_batch() const { return cfg_.micro_batch; }

  /// G_I outputs for every Stage 0 input, computed once in inference mode.
  nn::Tensor<float> refine_inputs(const nn::Tensor<float>& synthetic);

  /// `synthetic` holds Stage 0 images at the G_I input size.
  TrainResult train(const nn::Tensor<float>& synthetic, const nn::Tensor<float>& real,
                    const TrainOptions& opts = {});

  Checkpoint checkpoint(const std::string& config_text = {});
  void resume(const Checkpoint& ckpt);

  nn::GeneratorG2<float>& generator() { return g_; }
  nn::DiscriminatorD2<float>& discriminator() { return d_; }
  std::mt19937_64& rng() { return rng_; }
  std::uint64_t& step_counter() { return step_; }
  std::size_t& next_epoch() { return epoch_; }

 private:
  Stage2Config cfg_;
  std::uint64_t seed_;
  nn::RefinerG1<float>& g1_;
  nn::GeneratorG2<float> g_;
  nn::DiscriminatorD2<float> d_;
  Adam<float> opt_g_;
  Adam<float> opt_d_;
  HistoryBuffer history_;
  std::mt19937_64 rng_;
  std::uint64_t step_ = 0;
  std::size_t epoch_ = 0;
};

/// Loads a Stage I checkpoint's refiner.
std::unique_ptr<nn::RefinerG1<float>> load_refiner(const Checkpoint& ckpt, const nn::RefinerConfig& cfg);

}  // namespace ivusim::train
