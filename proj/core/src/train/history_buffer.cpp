#include "ivusim/train/history_buffer.hpp"

#include <algorithm>
#include <numeric>

namespace ivusim::train {

HistoryBuffer::HistoryBuffer(std::size_t capacity, std::uint64_t seed)
    : capacity_(capacity), rng_(seed) {}

std::vector<std::size_t> HistoryBuffer::push(const nn::Tensor<float>& batch) {
  std::vector<std::size_t> evicted;
  if (capacity_ == 0 || batch.empty()) return evicted;
  const nn::Shape s = batch.shape();
  const nn::Shape item{1, s.c, s.h, s.w};
  if (!items_.empty() && item != item_shape_) {
    throw ShapeError("history buffer: image shape changed to " + item.str());
  }
  item_shape_ = item;
  for (std::size_t n = 0; n < s.n; ++n) {
    std::vector<float> img(batch.sample(n), batch.sample(n) + s.per_sample());
    if (items_.size() < capacity_) {
      items_.push_back(std::move(img));
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
      const std::size_t victim = pick(rng_);
      items_[victim] = std::move(img);
      evicted.push_back(victim);
    }
  }
  return evicted;
}

nn::Tensor<float> HistoryBuffer::sample(std::size_t k) {
  if (items_.empty()) return {};
  if (k > items_.size()) throw ValidationError("history buffer: sample larger than stored count");
  std::vector<std::size_t> idx(items_.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates for k distinct slots.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng_)]);
  }
  nn::Tensor<float> out(nn::Shape{k, item_shape_.c, item_shape_.h, item_shape_.w});
  for (std::size_t i = 0; i < k; ++i) {
    std::copy(items_[idx[i]].begin(), items_[idx[i]].end(), out.sample(i));
  }
  return out;
}

nn::Tensor<float> mix_with_history(const nn::Tensor<float>& current, HistoryBuffer& buffer) {
  if (buffer.empty() || buffer.capacity() == 0) return current;
  const nn::Shape s = current.shape();
  const std::size_t from_history = std::min(s.n / 2, buffer.size());
  if (from_history == 0) return current;
  const std::size_t from_current = s.n - from_history;
  auto hist = buffer.sample(from_history);
  nn::Tensor<float> out(s);
  std::copy(current.data(), current.data() + from_current * s.per_sample(), out.data());
  std::copy(hist.data(), hist.data() + hist.size(), out.sample(from_current));
  return out;
}

}  // namespace ivusim::train
