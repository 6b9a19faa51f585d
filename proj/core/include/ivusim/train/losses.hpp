#pragma once

#include <span>

#include "ivusim/nn/models.hpp"

namespace ivusim::train {

// Discriminator outputs are read as the probability that the input is
// refined (simulated). The generator minimizes -sum log(1 - D(G(x))), which
// pushes D(G(x)) toward 0 ("real"); the discriminator minimizes
// -sum log D(refined) - sum log(1 - D(real)).

/// -sum_i log(1 - p_i).
double generator_adversarial_loss(std::span<const double> p_refined);

/// -sum_i log p_refined_i - sum_j log(1 - p_real_j).
double discriminator_loss(std::span<const double> p_refined, std::span<const double> p_real);

/// Same as generator_adversarial_loss, from logits: sum softplus(z).
/// If `grad` is non-null it receives d/dz.
template <typename T>
double generator_adversarial_from_logits(const nn::Tensor<T>& logits, nn::Tensor<T>* grad);

/// Same as discriminator_loss, from logits:
/// sum softplus(-z_refined) + sum softplus(z_real).
template <typename T>
double discriminator_from_logits(const nn::Tensor<T>& refined_logits, const nn::Tensor<T>& real_logits,
                                 nn::Tensor<T>* grad_refined, nn::Tensor<T>* grad_real);

/// Self-regularization: sum over pixels of |refined - synthetic|, divided by
/// `normalizer` (the batch size when 0). If `grad` is non-null it receives the
/// gradient w.r.t. `refined`.
template <typename T>
double loss_reg(const nn::Tensor<T>& refined, const nn::Tensor<T>& synthetic,
                nn::Tensor<T>* grad = nullptr, double normalizer = 0.0);

struct GeneratorLoss {
  double total = 0.0;
  double adversarial = 0.0;
  double reg = 0.0;
};

/// Stage I generator objective: adversarial term + lambda * l_reg.
/// Forward only; parameters and gradients are left untouched.
template <typename T>
GeneratorLoss loss_g1(nn::RefinerG1<T>& g, nn::DiscriminatorD1<T>& d, const nn::Tensor<T>& x,
                      double lambda, nn::Mode mode = nn::Mode::kTrainFrozenStats);

/// Evaluates the Stage I generator objective and accumulates its gradient
/// into g's parameters. The regularizer is divided by `reg_normalizer`
/// (0 = batch size), which lets micro-batches sum to a full-batch gradient.
/// d's parameter gradients are also written and must be cleared by the caller
/// before a discriminator update.
template <typename T>
GeneratorLoss g1_loss_and_gradient(nn::RefinerG1<T>& g, nn::DiscriminatorD1<T>& d,
                                   const nn::Tensor<T>& x, double lambda,
                                   double reg_normalizer = 0.0,
                                   nn::Mode mode = nn::Mode::kTrainFrozenStats);

/// Discriminator objective on already refined images and real images.
template <typename T>
double loss_d(nn::Network<T>& d, const nn::Tensor<T>& refined, const nn::Tensor<T>& real,
              nn::Mode mode = nn::Mode::kTrainFrozenStats);

/// As loss_d, accumulating the gradient into d's parameters.
template <typename T>
double d_loss_and_gradient(nn::Network<T>& d, const nn::Tensor<T>& refined, const nn::Tensor<T>& real,
                           nn::Mode mode = nn::Mode::kTrain);

/// Stage II generator objective on x, with the Stage I refiner evaluated in
/// inference mode and never differentiated.
template <typename T>
double loss_g2(nn::GeneratorG2<T>& g2, nn::DiscriminatorD2<T>& d2, nn::RefinerG1<T>& g1_frozen,
               const nn::Tensor<T>& x, nn::Mode mode = nn::Mode::kTrainFrozenStats);

/// Stage II generator gradient on already refined (G_I output) inputs.
template <typename T>
double g2_loss_and_gradient(nn::GeneratorG2<T>& g2, nn::DiscriminatorD2<T>& d2,
                            const nn::Tensor<T>& refined_low_res);

}  // namespace ivusim::train
