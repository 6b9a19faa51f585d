#pragma once

#include <cstddef>
#include <string>

#include "ivusim/train/adam.hpp"

namespace ivusim::train {

struct Stage1Config {
  double learning_rate = 0.001;
  std::size_t epochs = 20;
  std::size_t batch_size = 512;
  /// Gradient-accumulation chunk; 0 means the whole batch at once.
  std::size_t micro_batch = 0;
  double lambda = 0.1;
  /// History buffer capacity, in batches.
  std::size_t history_batches = 50;
  AdamConfig adam;

  void validate() const;
};

struct Stage2Config {
  double initial_learning_rate = 0.0002;
  double decay = 0.5;
  std::size_t decay_every = 100;
  std::size_t epochs = 1200;
  std::size_t batch_size = 64;
  std::size_t micro_batch = 0;
  std::size_t history_batches = 0;
  AdamConfig adam;

  /// initial * decay^floor(epoch / decay_every).
  double learning_rate(std::size_t epoch) const;
  void validate() const;
};

}  // namespace ivusim::train
