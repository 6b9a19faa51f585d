#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ivusim/nn/tensor.hpp"

namespace ivusim::train {

/// Bounded pool of previously refined images. Once full, each pushed image
/// replaces a uniformly chosen stored one.
class HistoryBuffer {
 public:
  HistoryBuffer(std::size_t capacity, std::uint64_t seed);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  /// Stores every image of `batch` (N x C x H x W). Returns the slot indices
  /// that were overwritten, in push order.
  std::vector<std::size_t> push(const nn::Tensor<float>& batch);

  /// k distinct stored images as a k x C x H x W tensor. Returns an empty
  /// tensor when the buffer is empty; throws if k exceeds the stored count.
  nn::Tensor<float> sample(std::size_t k);

 private:
  std::size_t capacity_;
  nn::Shape item_shape_;
  std::vector<std::vector<float>> items_;
  std::mt19937_64 rng_;
};

/// Discriminator minibatch: half the current refined batch plus history
/// samples for the other half once the buffer holds any. Falls back to the
/// whole current batch when the buffer is empty.
nn::Tensor<float> mix_with_history(const nn::Tensor<float>& current, HistoryBuffer& buffer);

}  // namespace ivusim::train
