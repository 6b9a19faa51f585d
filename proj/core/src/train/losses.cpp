#include "ivusim/train/losses.hpp"

#include <cmath>
#include <string>

namespace ivusim::train {
namespace {

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
double logistic(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw TrainingDiverged(std::string(what) + " is not finite");
}

void require_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ValidationError("loss: probabilities must lie strictly inside (0,1)");
  }
}

}  // namespace

double generator_adversarial_loss(std::span<const double> p_refined) {
  double s = 0.0;
  for (double p : p_refined) {
    require_probability(p);
    s -= std::log1p(-p);
  }
  return s;
}

double discriminator_loss(std::span<const double> p_refined, std::span<const double> p_real) {
  double s = 0.0;
  for (double p : p_refined) {
    require_probability(p);
    s -= std::log(p);
  }
  for (double p : p_real) {
    require_probability(p);
    s -= std::log1p(-p);
  }
  return s;
}

template <typename T>
double generator_adversarial_from_logits(const nn::Tensor<T>& logits, nn::Tensor<T>* grad) {
  double s = 0.0;
  if (grad) *grad = nn::Tensor<T>(logits.shape());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double z = logits.values()[i];
    s += softplus(z);
    if (grad) grad->values()[i] = static_cast<T>(logistic(z));
  }
  return s;
}

template <typename T>
double discriminator_from_logits(const nn::Tensor<T>& refined_logits, const nn::Tensor<T>& real_logits,
                                 nn::Tensor<T>* grad_refined, nn::Tensor<T>* grad_real) {
  double s = 0.0;
  if (grad_refined) *grad_refined = nn::Tensor<T>(refined_logits.shape());
  if (grad_real) *grad_real = nn::Tensor<T>(real_logits.shape());
  for (std::size_t i = 0; i < refined_logits.size(); ++i) {
    const double z = refined_logits.values()[i];
    s += softplus(-z);
    if (grad_refined) grad_refined->values()[i] = static_cast<T>(logistic(z) - 1.0);
  }
  for (std::size_t i = 0; i < real_logits.size(); ++i) {
    const double z = real_logits.values()[i];
    s += softplus(z);
    if (grad_real) grad_real->values()[i] = static_cast<T>(logistic(z));
  }
  return s;
}

template <typename T>
double loss_reg(const nn::Tensor<T>& refined, const nn::Tensor<T>& synthetic, nn::Tensor<T>* grad,
                double normalizer) {
  if (refined.shape() != synthetic.shape()) {
    throw ShapeError("loss_reg: " + refined.shape().str() + " vs " + synthetic.shape().str());
  }
  const double norm = normalizer > 0.0 ? normalizer : static_cast<double>(refined.shape().n);
  if (!(norm > 0.0)) throw ShapeError("loss_reg: empty batch");
  if (grad) *grad = nn::Tensor<T>(refined.shape());
  double s = 0.0;
  const T g = static_cast<T>(1.0 / norm);
  for (std::size_t i = 0; i < refined.size(); ++i) {
    const double d = static_cast<double>(refined.values()[i]) - static_cast<double>(synthetic.values()[i]);
    s += std::abs(d);
    if (grad) grad->values()[i] = d > 0.0 ? g : (d < 0.0 ? -g : T(0));
  }
  return s / norm;
}

template <typename T>
GeneratorLoss loss_g1(nn::RefinerG1<T>& g, nn::DiscriminatorD1<T>& d, const nn::Tensor<T>& x,
                      double lambda, nn::Mode mode) {
  // Evaluation never updates running statistics.
  const auto fwd_mode = mode == nn::Mode::kTrain ? nn::Mode::kTrainFrozenStats : mode;
  const auto refined = g.forward(x, fwd_mode);
  GeneratorLoss out;
  out.adversarial = generator_adversarial_from_logits<T>(d.forward(refined, fwd_mode), nullptr);
  out.reg = loss_reg(refined, x);
  out.total = out.adversarial + lambda * out.reg;
  require_finite(out.total, "L_G1");
  return out;
}

template <typename T>
GeneratorLoss g1_loss_and_gradient(nn::RefinerG1<T>& g, nn::DiscriminatorD1<T>& d,
                                   const nn::Tensor<T>& x, double lambda, double reg_normalizer,
                                   nn::Mode mode) {
  const auto refined = g.forward(x, mode);
  const auto logits = d.forward(refined, mode == nn::Mode::kTrain ? nn::Mode::kTrainFrozenStats : mode);
  nn::Tensor<T> dlogits;
  nn::Tensor<T> dreg;
  GeneratorLoss out;
  out.adversarial = generator_adversarial_from_logits<T>(logits, &dlogits);
  out.reg = loss_reg(refined, x, &dreg, reg_normalizer);
  out.total = out.adversarial + lambda * out.reg;
  require_finite(out.total, "L_G1");
  auto drefined = d.backward(dlogits);
  auto dr = drefined.values();
  auto rg = dreg.values();
  const T l = static_cast<T>(lambda);
  for (std::size_t i = 0; i < dr.size(); ++i) dr[i] += l * rg[i];
  g.backward(drefined);
  return out;
}

template <typename T>
double loss_d(nn::Network<T>& d, const nn::Tensor<T>& refined, const nn::Tensor<T>& real, nn::Mode mode) {
  const double v = discriminator_from_logits<T>(d.forward(refined, mode), d.forward(real, mode), nullptr, nullptr);
  require_finite(v, "L_D");
  return v;
}

template <typename T>
double d_loss_and_gradient(nn::Network<T>& d, const nn::Tensor<T>& refined, const nn::Tensor<T>& real,
                           nn::Mode mode) {
  // Two passes share the layer caches, so run backward right after each forward.
  nn::Tensor<T> g_ref;
  nn::Tensor<T> g_real;
  const auto z_ref = d.forward(refined, mode);
  const double l_ref = discriminator_from_logits<T>(z_ref, nn::Tensor<T>(), &g_ref, nullptr);
  d.backward(g_ref);
  const auto z_real = d.forward(real, mode);
  const double l_real = discriminator_from_logits<T>(nn::Tensor<T>(), z_real, nullptr, &g_real);
  d.backward(g_real);
  const double v = l_ref + l_real;
  require_finite(v, "L_D");
  return v;
}

template <typename T>
double loss_g2(nn::GeneratorG2<T>& g2, nn::DiscriminatorD2<T>& d2, nn::RefinerG1<T>& g1_frozen,
               const nn::Tensor<T>& x, nn::Mode mode) {
  const auto low = g1_frozen.forward(x, nn::Mode::kInference);
  const auto fwd_mode = mode == nn::Mode::kTrain ? nn::Mode::kTrainFrozenStats : mode;
  const double v = generator_adversarial_from_logits<T>(d2.forward(g2.forward(low, fwd_mode), fwd_mode), nullptr);
  require_finite(v, "L_G2");
  return v;
}

template <typename T>
double g2_loss_and_gradient(nn::GeneratorG2<T>& g2, nn::DiscriminatorD2<T>& d2,
                            const nn::Tensor<T>& refined_low_res) {
  const auto fake = g2.forward(refined_low_res, nn::Mode::kTrain);
  const auto logits = d2.forward(fake, nn::Mode::kTrainFrozenStats);
  nn::Tensor<T> dlogits;
  const double v = generator_adversarial_from_logits(logits, &dlogits);
  require_finite(v, "L_G2");
  g2.backward(d2.backward(dlogits));
  return v;
}

#define IVUSIM_INSTANTIATE_LOSSES(T)                                                              \
  template double generator_adversarial_from_logits<T>(const nn::Tensor<T>&, nn::Tensor<T>*);     \
  template double discriminator_from_logits<T>(const nn::Tensor<T>&, const nn::Tensor<T>&,       \
                                               nn::Tensor<T>*, nn::Tensor<T>*);                   \
  template double loss_reg<T>(const nn::Tensor<T>&, const nn::Tensor<T>&, nn::Tensor<T>*, double); \
  template GeneratorLoss loss_g1<T>(nn::RefinerG1<T>&, nn::DiscriminatorD1<T>&,                   \
                                    const nn::Tensor<T>&, double, nn::Mode);                      \
  template GeneratorLoss g1_loss_and_gradient<T>(nn::RefinerG1<T>&, nn::DiscriminatorD1<T>&,      \
                                                 const nn::Tensor<T>&, double, double, nn::Mode); \
  template double loss_d<T>(nn::Network<T>&, const nn::Tensor<T>&, const nn::Tensor<T>&, nn::Mode); \
  template double d_loss_and_gradient<T>(nn::Network<T>&, const nn::Tensor<T>&,                   \
                                         const nn::Tensor<T>&, nn::Mode);                         \
  template double loss_g2<T>(nn::GeneratorG2<T>&, nn::DiscriminatorD2<T>&, nn::RefinerG1<T>&,     \
                             const nn::Tensor<T>&, nn::Mode);                                     \
  template double g2_loss_and_gradient<T>(nn::GeneratorG2<T>&, nn::DiscriminatorD2<T>&,           \
                                          const nn::Tensor<T>&);

IVUSIM_INSTANTIATE_LOSSES(float)
IVUSIM_INSTANTIATE_LOSSES(double)

}  // namespace ivusim::train
