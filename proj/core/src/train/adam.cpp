#include "ivusim/train/adam.hpp"

#include <cmath>

namespace ivusim::train {

template <typename T>
Adam<T>::Adam(std::vector<nn::Parameter<T>*> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  for (auto* p : params_) {
    m_.emplace_back(p->value.shape(), T(0));
    v_.emplace_back(p->value.shape(), T(0));
  }
}

template <typename T>
void Adam<T>::step(double learning_rate) {
  ++t_;
  const double b1 = cfg_.beta1;
  const double b2 = cfg_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double step = learning_rate * std::sqrt(c2) / c1;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto w = params_[k]->value.values();
    auto g = params_[k]->grad.values();
    auto m = m_[k].values();
    auto v = v_[k].values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g[i];
      m[i] = static_cast<T>(b1 * m[i] + (1.0 - b1) * gi);
      v[i] = static_cast<T>(b2 * v[i] + (1.0 - b2) * gi * gi);
      w[i] -= static_cast<T>(step * m[i] / (std::sqrt(static_cast<double>(v[i])) + cfg_.eps));
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace ivusim::train
