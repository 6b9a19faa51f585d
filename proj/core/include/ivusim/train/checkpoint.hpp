#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ivusim/nn/models.hpp"
#include "ivusim/train/adam.hpp"

namespace ivusim::train {

struct NamedTensor {
  std::string name;
  nn::Tensor<float> value;
};

/// Everything needed to resume or deploy a training stage. Tensor sections
/// are keyed by role ("g1", "d1", "g1.adam", ...).
struct Checkpoint {
  std::string stage;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  std::uint64_t epoch = 0;
  std::string rng_state;
  std::string config;
  std::map<std::string, std::string> text;
  std::map<std::string, std::vector<NamedTensor>> sections;

  const std::vector<NamedTensor>& section(const std::string& key) const;
};

/// Binary file, written to a temporary name and renamed into place.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Parameters followed by buffers (running statistics).
std::vector<NamedTensor> snapshot(nn::Network<float>& net);
/// Throws ShapeError on any name, count or shape mismatch.
void restore(nn::Network<float>& net, const std::vector<NamedTensor>& tensors);

std::vector<NamedTensor> snapshot(Adam<float>& opt);
void restore(Adam<float>& opt, const std::vector<NamedTensor>& tensors);

/// SHA-256 over every parameter and buffer name, shape and value.
std::string parameter_hash(nn::Network<float>& net);

}  // namespace ivusim::train
