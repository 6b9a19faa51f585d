#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ivusim/nn/layers.hpp"
#include "ivusim/util/kv_config.hpp"

namespace ivusim::nn {

/// A network with an image-shaped input contract.
template <typename T>
class Network {
 public:
  virtual ~Network() = default;
  Network() = default;
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  virtual Tensor<T> forward(const Tensor<T>& x, Mode mode) = 0;
  virtual Tensor<T> backward(const Tensor<T>& grad_out) = 0;
  /// Architecture fingerprint, checked when loading checkpoints.
  virtual std::string describe() const = 0;
  virtual void set_trace(TraceHook hook) = 0;

  /// Trainable parameters in a fixed order.
  std::vector<Parameter<T>*> parameters();
  /// Running statistics and other non-trainable state, in a fixed order.
  std::vector<Tensor<T>*> buffers();
  void zero_grad();
  void init(std::uint64_t seed);

 protected:
  virtual void collect(std::vector<Parameter<T>*>& params, std::vector<Tensor<T>*>& buffers) = 0;
};

/// Exact number of trainable scalars.
template <typename T>
std::size_t count_params(Network<T>& net);
template <typename T>
std::size_t count_params(Layer<T>& layer);

struct RefinerConfig {
  std::size_t image_size = 64;
  std::size_t width = 64;
  std::size_t blocks = 4;
  bool batch_norm = false;

  static RefinerConfig from_config(const KvConfig& cfg);
};

struct Discriminator1Config {
  std::size_t image_size = 64;
  std::vector<std::size_t> widths{64, 128, 256, 512};
  std::size_t stride1 = 2;
  std::size_t stride2 = 2;
  bool per_patch = false;
  double leak = 0.2;

  static Discriminator1Config from_config(const KvConfig& cfg);
};

struct Generator2Config {
  std::size_t input_size = 64;
  std::size_t width = 64;
  std::size_t blocks = 4;
  std::vector<std::size_t> up_widths{32, 16};  // at 2x and 4x the input size
  bool batch_norm = true;

  std::size_t output_size() const { return input_size * 4; }
  static Generator2Config from_config(const KvConfig& cfg);
};

struct Discriminator2Config {
  std::size_t image_size = 256;
  std::vector<std::size_t> widths{16, 32, 64, 128, 128, 128};  // one per stride-2 block
  std::size_t head_channels = 16;
  bool batch_norm = true;
  double leak = 0.2;

  static Discriminator2Config from_config(const KvConfig& cfg);
};

/// Config keys understood by the four `from_config` readers.
const std::vector<std::string>& model_config_keys();

/// Stage I refiner: 3x3 entry conv, residual blocks, 1x1 exit conv, sigmoid.
/// Maps N x 1 x S x S to N x 1 x S x S in (0,1).
template <typename T>
class RefinerG1 final : public Network<T> {
 public:
  explicit RefinerG1(RefinerConfig cfg);
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string describe() const override;
  void set_trace(TraceHook hook) override { net_.set_trace(std::move(hook)); }
  const RefinerConfig& config() const { return cfg_; }

 private:
  void collect(std::vector<Parameter<T>*>& p, std::vector<Tensor<T>*>& b) override;
  RefinerConfig cfg_;
  Sequential<T> net_;
};

/// Stage I discriminator: five convolutions and two max-pools. Returns
/// logits of "refined": N x 1 x 1 x 1, or N x 1 x h x w when per_patch.
template <typename T>
class DiscriminatorD1 final : public Network<T> {
 public:
  explicit DiscriminatorD1(Discriminator1Config cfg);
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string describe() const override;
  void set_trace(TraceHook hook) override { net_.set_trace(std::move(hook)); }
  const Discriminator1Config& config() const { return cfg_; }

 private:
  void collect(std::vector<Parameter<T>*>& p, std::vector<Tensor<T>*>& b) override;
  Discriminator1Config cfg_;
  Sequential<T> net_;
};

/// Stage II generator. Two max-pools bring S x S down to S/4 (the
/// "bottleneck" trace tag), residual blocks follow, two upsampling steps
/// return to S where the entry features are added back, and two more reach
/// 4S. Output in (0,1).
template <typename T>
class GeneratorG2 final : public Network<T> {
 public:
  explicit GeneratorG2(Generator2Config cfg);
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string describe() const override;
  void set_trace(TraceHook hook) override;
  const Generator2Config& config() const { return cfg_; }

 private:
  void collect(std::vector<Parameter<T>*>& p, std::vector<Tensor<T>*>& b) override;
  Generator2Config cfg_;
  Sequential<T> entry_;
  Sequential<T> down_;
  Sequential<T> up_low_;
  Sequential<T> up_high_;
};

/// Stage II discriminator: stride-2 blocks down to 4 x 4 (the "prehead"
/// trace tag), a 1x1 convolution and a fully connected layer. Logits N x 1 x 1 x 1.
template <typename T>
class DiscriminatorD2 final : public Network<T> {
 public:
  explicit DiscriminatorD2(Discriminator2Config cfg);
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string describe() const override;
  void set_trace(TraceHook hook) override { net_.set_trace(std::move(hook)); }
  const Discriminator2Config& config() const { return cfg_; }

 private:
  void collect(std::vector<Parameter<T>*>& p, std::vector<Tensor<T>*>& b) override;
  Discriminator2Config cfg_;
  Sequential<T> net_;
};

/// Throws ShapeError unless x is N x 1 x size x size with N >= 1.
template <typename T>
void require_image_batch(const Tensor<T>& x, std::size_t size, const char* who);

/// Bounded logistic of each logit; one value per image for per-image heads.
template <typename T>
std::vector<double> probabilities(const Tensor<T>& logits);

}  // namespace ivusim::nn
