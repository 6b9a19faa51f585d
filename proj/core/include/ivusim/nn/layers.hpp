#pragma once

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ivusim/nn/tensor.hpp"

namespace ivusim::nn {

enum class Mode {
  kInference,         // running statistics, no caching
  kTrain,             // batch statistics, caches for backward, updates running stats
  kTrainFrozenStats,  // batch statistics and caches, running stats untouched
};

inline bool caches(Mode m) { return m != Mode::kInference; }

/// Called with a layer tag and the activation shape after that layer.
using TraceHook = std::function<void(std::string_view tag, const Shape& shape)>;

template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor<T> forward(const Tensor<T>& x, Mode mode) = 0;
  /// Gradient w.r.t. the input of the last caching forward; accumulates
  /// parameter gradients.
  virtual Tensor<T> backward(const Tensor<T>& grad_out) = 0;
  virtual void collect_parameters(std::vector<Parameter<T>*>&) {}
  /// Non-trainable state that still belongs in a checkpoint.
  virtual void collect_buffers(std::vector<Tensor<T>*>&) {}
  virtual std::string kind() const = 0;
};

template <typename T>
using LayerPtr = std::unique_ptr<Layer<T>>;

struct ConvSpec {
  std::size_t in = 1;
  std::size_t out = 1;
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t pad = 1;
};

/// 2D convolution by im2col and a dense matrix product per sample.
template <typename T>
class Conv2d final : public Layer<T> {
 public:
  Conv2d(ConvSpec spec, std::string name);
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  void collect_parameters(std::vector<Parameter<T>*>& out) override;
  std::string kind() const override { return "conv"; }

  const ConvSpec& spec() const { return spec_; }
  Parameter<T>& weight() { return weight_; }
  Parameter<T>& bias() { return bias_; }

 private:
  Shape out_shape(const Shape& in) const;

  ConvSpec spec_;
  Parameter<T> weight_;  // out x (in * k * k)
  Parameter<T> bias_;    // out
  Tensor<T> input_;
};

template <typename T>
class Relu final : public Layer<T> {
 public:
  explicit Relu(T negative_slope = T(0)) : slope_(negative_slope) {}
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string kind() const override { return "relu"; }

 private:
  T slope_;
  Tensor<T> input_;
};

/// Logistic function with the pre-activation clamped so that the output stays
/// strictly inside (0,1) in T.
template <typename T>
class BoundedSigmoid final : public Layer<T> {
 public:
  static T limit();
  static T apply(T x);
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string kind() const override { return "sigmoid"; }

 private:
  Tensor<T> input_;
  Tensor<T> output_;
};

/// 2x2 max pooling, stride 2.
template <typename T>
class MaxPool2 final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string kind() const override { return "maxpool"; }

 private:
  Shape in_shape_;
  std::vector<std::size_t> argmax_;
};

/// Nearest-neighbour 2x upsampling.
template <typename T>
class Upsample2 final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string kind() const override { return "upsample"; }

 private:
  Shape in_shape_;
};

/// Per-channel batch normalization with affine scale and shift.
template <typename T>
class BatchNorm2d final : public Layer<T> {
 public:
  BatchNorm2d(std::size_t channels, std::string name, T momentum = T(0.1), T eps = T(1e-5));
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  void collect_parameters(std::vector<Parameter<T>*>& out) override;
  void collect_buffers(std::vector<Tensor<T>*>& out) override;
  std::string kind() const override { return "batchnorm"; }

 private:
  std::size_t channels_;
  T momentum_;
  T eps_;
  Parameter<T> gamma_;
  Parameter<T> beta_;
  Tensor<T> running_mean_;
  Tensor<T> running_var_;
  Tensor<T> xhat_;
  std::vector<T> inv_std_;
};

/// Mean over the spatial extent: (n, c, h, w) -> (n, c, 1, 1).
template <typename T>
class GlobalAvgPool final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string kind() const override { return "avgpool"; }

 private:
  Shape in_shape_;
};

/// Fully connected layer on the flattened sample: (n, c, h, w) -> (n, out, 1, 1).
template <typename T>
class Linear final : public Layer<T> {
 public:
  Linear(std::size_t in, std::size_t out, std::string name);
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  void collect_parameters(std::vector<Parameter<T>*>& out) override;
  std::string kind() const override { return "linear"; }

 private:
  std::size_t in_;
  std::size_t out_;
  Parameter<T> weight_;
  Parameter<T> bias_;
  Tensor<T> input_;
};

/// Ordered chain of layers. Tagged layers report their output shape to the
/// trace hook, if one is installed.
template <typename T>
class Sequential final : public Layer<T> {
 public:
  Sequential& add(LayerPtr<T> layer, std::string tag = {});
  template <typename L, typename... Args>
  Sequential& emplace(Args&&... args) {
    return add(std::make_unique<L>(std::forward<Args>(args)...));
  }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  void collect_parameters(std::vector<Parameter<T>*>& out) override;
  void collect_buffers(std::vector<Tensor<T>*>& out) override;
  std::string kind() const override { return "sequential"; }

  void set_trace(TraceHook hook);
  std::size_t depth() const { return layers_.size(); }

 private:
  std::vector<LayerPtr<T>> layers_;
  std::vector<std::string> tags_;
  TraceHook trace_;
};

/// y = x + F(x).
template <typename T>
class Residual final : public Layer<T> {
 public:
  explicit Residual(Sequential<T> body) : body_(std::move(body)) {}
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  void collect_parameters(std::vector<Parameter<T>*>& out) override { body_.collect_parameters(out); }
  void collect_buffers(std::vector<Tensor<T>*>& out) override { body_.collect_buffers(out); }
  std::string kind() const override { return "residual"; }

 private:
  Sequential<T> body_;
};

/// He-normal weights, zero biases; batch-norm scale 1, shift 0.
template <typename T>
void init_parameters(const std::vector<Parameter<T>*>& params, std::mt19937_64& rng);

/// Elementwise a += b.
template <typename T>
void add_inplace(Tensor<T>& a, const Tensor<T>& b);

}  // namespace ivusim::nn
