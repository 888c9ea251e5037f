#pragma once

#include <span>
#include <vector>

#include "storn/tensor.hpp"

namespace storn {

inline constexpr double kProbClamp = 1e-7;
inline constexpr double kHalfLog2Pi = 0.91893853320467274178;

/// Masked negative log-likelihood, split per sequence (batch column).
struct LossResult {
  std::vector<double> per_sequence;
  double total = 0.0;
};

// Step-level row losses. Inputs are batch x channels for one time step, the
// mask holds one entry per row, and the result is a rank-1 tensor of per-row
// sums over channels (zero for masked-out rows).

Tensor bernoulli_nll_rows(const Tensor& probs, const Tensor& targets,
                          std::span<const double> mask, double clamp = kProbClamp);
/// Same loss from logits a (p = sigmoid(a)) as softplus(a) - x a, with a
/// clamped to the logits of [clamp, 1 - clamp]. Avoids forming 1 - p.
Tensor bernoulli_logit_nll_rows(const Tensor& logits, const Tensor& targets,
                                std::span<const double> mask, double clamp = kProbClamp);
Tensor gaussian_nll_rows(const Tensor& mean, const Tensor& targets, double sigma,
                         std::span<const double> mask);
/// KL(N(mu, sigma^2) || N(0, 1)) summed over latent channels.
Tensor kl_rows(const Tensor& mu, const Tensor& sigma, std::span<const double> mask);

// Whole-batch losses over time x batch x channels tensors with a time x batch
// mask.

LossResult bernoulli_nll(const Tensor& probs, const Tensor& targets, const Tensor& mask,
                         double clamp = kProbClamp);
LossResult bernoulli_logit_nll(const Tensor& logits, const Tensor& targets, const Tensor& mask,
                               double clamp = kProbClamp);
LossResult gaussian_nll(const Tensor& mean, double sigma, const Tensor& targets,
                        const Tensor& mask);
/// Per-entry standard deviations, same shape as `mean`.
LossResult gaussian_nll(const Tensor& mean, const Tensor& sigma, const Tensor& targets,
                        const Tensor& mask);

/// log((1 - clamp) / clamp), the logit bound matching a probability clamp.
double logit_bound(double clamp);

/// Throws ValidationError unless every masked-in target is exactly 0 or 1.
void require_binary(const Tensor& targets, std::span<const double> mask);

}  // namespace storn
