#pragma once

#include <algorithm>
#include <cstddef>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "ivusim/error.hpp"

namespace ivusim::nn {

/// NCHW extents.
struct Shape {
  std::size_t n = 0;
  std::size_t c = 0;
  std::size_t h = 0;
  std::size_t w = 0;

  std::size_t size() const { return n * c * h * w; }
  std::size_t per_sample() const { return c * h * w; }
  std::size_t plane() const { return h * w; }
  std::string str() const {
    return std::to_string(n) + "x" + std::to_string(c) + "x" + std::to_string(h) + "x" +
           std::to_string(w);
  }
  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Cache-line aligned storage, so vectorized reductions see the same
/// element alignment on every run.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  template <typename U>
  friend bool operator==(const AlignedAllocator&, const AlignedAllocator<U>&) {
    return true;
  }
};

template <typename T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape s, T fill = T{}) : shape_(s), data_(s.size(), fill) {}
  Tensor(Shape s, const std::vector<T>& values) : shape_(s), data_(values.begin(), values.end()) {
    if (data_.size() != shape_.size()) throw ShapeError("tensor: value count != " + s.str());
  }
  Tensor(Shape s, AlignedVector<T> values) : shape_(s), data_(std::move(values)) {
    if (data_.size() != shape_.size()) throw ShapeError("tensor: value count != " + s.str());
  }

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  T& operator()(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    return data_[((n * shape_.c + c) * shape_.h + h) * shape_.w + w];
  }
  T operator()(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return data_[((n * shape_.c + c) * shape_.h + h) * shape_.w + w];
  }

  T* sample(std::size_t n) { return data_.data() + n * shape_.per_sample(); }
  const T* sample(std::size_t n) const { return data_.data() + n * shape_.per_sample(); }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  /// Same data, new extents of equal total size.
  Tensor reshaped(Shape s) const& {
    if (s.size() != shape_.size()) throw ShapeError("reshape " + shape_.str() + " -> " + s.str());
    return Tensor(s, data_);
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  AlignedVector<T> data_;
};

/// A trainable tensor and its accumulated gradient.
template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Parameter(std::string n, Shape s) : name(std::move(n)), value(s), grad(s) {}
};

/// Converts a tensor between scalar types.
template <typename To, typename From>
Tensor<To> cast(const Tensor<From>& t) {
  AlignedVector<To> v(t.values().begin(), t.values().end());
  return Tensor<To>(t.shape(), std::move(v));
}

}  // namespace ivusim::nn
