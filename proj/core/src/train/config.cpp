#include "ivusim/train/config.hpp"

#include <cmath>

#include "ivusim/error.hpp"

namespace ivusim::train {
namespace {

void check_adam(const AdamConfig& a) {
  if (!(a.beta1 >= 0.0 && a.beta1 < 1.0) || !(a.beta2 >= 0.0 && a.beta2 < 1.0) || !(a.eps > 0.0)) {
    throw ValidationError("adam: need beta1, beta2 in [0,1) and eps > 0");
  }
}

}  // namespace

void Stage1Config::validate() const {
  if (!(learning_rate > 0.0) || epochs == 0 || batch_size == 0 || !(lambda >= 0.0)) {
    throw ValidationError("stage1: learning_rate, epochs and batch_size must be positive, lambda >= 0");
  }
  if (micro_batch > batch_size) throw ValidationError("stage1: micro_batch exceeds batch_size");
  check_adam(adam);
}

double Stage2Config::learning_rate(std::size_t epoch) const {
  return initial_learning_rate * std::pow(decay, static_cast<double>(epoch / decay_every));
}

void Stage2Config::validate() const {
  if (!(initial_learning_rate > 0.0) || epochs == 0 || batch_size == 0 || decay_every == 0) {
    throw ValidationError("stage2: learning rate, epochs, batch_size and decay_every must be positive");
  }
  if (!(decay > 0.0 && decay < 1.0)) throw ValidationError("stage2: decay must lie in (0,1)");
  if (micro_batch > batch_size) throw ValidationError("stage2: micro_batch exceeds batch_size");
  check_adam(adam);
}

}  // namespace ivusim::train
