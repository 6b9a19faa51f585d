#pragma once

#include <cstdint>
#include <vector>

#include "ivusim/nn/tensor.hpp"

namespace ivusim::train {

struct AdamConfig {
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam over a fixed parameter list. Only the listed parameters are ever
/// modified by step().
template <typename T>
class Adam {
 public:
  Adam(std::vector<nn::Parameter<T>*> params, AdamConfig cfg);

  void step(double learning_rate);
  std::uint64_t steps() const { return t_; }

  // Checkpoint access.
  std::vector<nn::Tensor<T>>& first_moments() { return m_; }
  std::vector<nn::Tensor<T>>& second_moments() { return v_; }
  void set_steps(std::uint64_t t) { t_ = t; }

 private:
  std::vector<nn::Parameter<T>*> params_;
  AdamConfig cfg_;
  std::vector<nn::Tensor<T>> m_;
  std::vector<nn::Tensor<T>> v_;
  std::uint64_t t_ = 0;
};

}  // namespace ivusim::train
