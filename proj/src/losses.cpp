#include "storn/losses.hpp"

#include <algorithm>
#include <cmath>

#include "storn/errors.hpp"
#include "storn/ops.hpp"

namespace storn {

namespace {

void require_rows(const Tensor& a, std::span<const double> mask, std::string_view what) {
  if (a.rank() != 2 || a.rows() != mask.size()) {
    throw DimensionError(std::string(what) + ": " + to_string(a.shape()) +
                         " does not match mask of length " + std::to_string(mask.size()));
  }
}

void require_batch(const Tensor& values, const Tensor& mask, std::string_view what) {
  if (values.rank() != 3 || mask.rank() != 2 || mask.dim(0) != values.dim(0) ||
      mask.dim(1) != values.dim(1)) {
    throw DimensionError(std::string(what) + ": values " + to_string(values.shape()) +
                         " and mask " + to_string(mask.shape()) + " disagree");
  }
}

std::span<const double> mask_row(const Tensor& mask, std::size_t t) {
  const std::size_t b = mask.dim(1);
  return mask.data().subspan(t * b, b);
}

template <class StepLoss>
LossResult accumulate(const Tensor& values, const Tensor& mask, StepLoss step) {
  LossResult r;
  r.per_sequence.assign(values.dim(1), 0.0);
  for (std::size_t t = 0; t < values.dim(0); ++t) {
    const Tensor rows = step(t, mask_row(mask, t));
    for (std::size_t b = 0; b < rows.size(); ++b) r.per_sequence[b] += rows[b];
  }
  for (double v : r.per_sequence) r.total += v;
  return r;
}

}  // namespace

void require_binary(const Tensor& targets, std::span<const double> mask) {
  require_rows(targets, mask, "require_binary");
  for (std::size_t i = 0; i < targets.rows(); ++i) {
    if (mask[i] == 0.0) continue;
    for (std::size_t j = 0; j < targets.cols(); ++j) {
      const double v = targets.at(i, j);
      if (v != 0.0 && v != 1.0) {
        throw ValidationError("bernoulli target at row " + std::to_string(i) + ", channel " +
                              std::to_string(j) + " is " + std::to_string(v) +
                              ", expected 0 or 1");
      }
    }
  }
}

Tensor bernoulli_nll_rows(const Tensor& probs, const Tensor& targets,
                          std::span<const double> mask, double clamp) {
  require_same_shape(probs, targets, "bernoulli_nll");
  require_rows(probs, mask, "bernoulli_nll");
  require_binary(targets, mask);
  Tensor out({probs.rows()});
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    if (mask[i] == 0.0) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < probs.cols(); ++j) {
      const double p = std::clamp(probs.at(i, j), clamp, 1.0 - clamp);
      s -= targets.at(i, j) == 1.0 ? std::log(p) : std::log1p(-p);
    }
    out[i] = s;
  }
  return out;
}

double logit_bound(double clamp) { return std::log((1.0 - clamp) / clamp); }

Tensor bernoulli_logit_nll_rows(const Tensor& logits, const Tensor& targets,
                                std::span<const double> mask, double clamp) {
  require_same_shape(logits, targets, "bernoulli_nll");
  require_rows(logits, mask, "bernoulli_nll");
  require_binary(targets, mask);
  const double hi = logit_bound(clamp);
  const auto softplus = [](double u) { return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u))); };
  Tensor out({logits.rows()});
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    if (mask[i] == 0.0) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < logits.cols(); ++j) {
      const double a = std::clamp(logits.at(i, j), -hi, hi);
      s += targets.at(i, j) == 1.0 ? softplus(-a) : softplus(a);
    }
    out[i] = s;
  }
  return out;
}

Tensor gaussian_nll_rows(const Tensor& mean, const Tensor& targets, double sigma,
                         std::span<const double> mask) {
  if (!(sigma > 0.0)) throw ArgumentError("gaussian_nll: standard deviation must be positive");
  require_same_shape(mean, targets, "gaussian_nll");
  require_rows(mean, mask, "gaussian_nll");
  const double log_sigma = std::log(sigma);
  Tensor out({mean.rows()});
  for (std::size_t i = 0; i < mean.rows(); ++i) {
    if (mask[i] == 0.0) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < mean.cols(); ++j) {
      const double r = (targets.at(i, j) - mean.at(i, j)) / sigma;
      s += 0.5 * r * r + log_sigma + kHalfLog2Pi;
    }
    out[i] = s;
  }
  return out;
}

Tensor kl_rows(const Tensor& mu, const Tensor& sigma, std::span<const double> mask) {
  require_same_shape(mu, sigma, "kl_standard_normal");
  require_rows(mu, mask, "kl_standard_normal");
  Tensor out({mu.rows()});
  for (std::size_t i = 0; i < mu.rows(); ++i) {
    if (mask[i] == 0.0) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < mu.cols(); ++j) {
      const double m = mu.at(i, j);
      const double sd = sigma.at(i, j);
      s += 0.5 * (m * m + sd * sd - 2.0 * std::log(sd) - 1.0);
    }
    out[i] = s;
  }
  return out;
}

LossResult bernoulli_nll(const Tensor& probs, const Tensor& targets, const Tensor& mask,
                         double clamp) {
  require_same_shape(probs, targets, "bernoulli_nll");
  require_batch(targets, mask, "bernoulli_nll");
  return accumulate(targets, mask, [&](std::size_t t, std::span<const double> m) {
    return bernoulli_nll_rows(probs.slice(t), targets.slice(t), m, clamp);
  });
}

LossResult bernoulli_logit_nll(const Tensor& logits, const Tensor& targets, const Tensor& mask,
                               double clamp) {
  require_same_shape(logits, targets, "bernoulli_nll");
  require_batch(targets, mask, "bernoulli_nll");
  return accumulate(targets, mask, [&](std::size_t t, std::span<const double> m) {
    return bernoulli_logit_nll_rows(logits.slice(t), targets.slice(t), m, clamp);
  });
}

LossResult gaussian_nll(const Tensor& mean, double sigma, const Tensor& targets,
                        const Tensor& mask) {
  require_same_shape(mean, targets, "gaussian_nll");
  require_batch(targets, mask, "gaussian_nll");
  return accumulate(targets, mask, [&](std::size_t t, std::span<const double> m) {
    return gaussian_nll_rows(mean.slice(t), targets.slice(t), sigma, m);
  });
}

LossResult gaussian_nll(const Tensor& mean, const Tensor& sigma, const Tensor& targets,
                        const Tensor& mask) {
  require_same_shape(mean, targets, "gaussian_nll");
  require_same_shape(mean, sigma, "gaussian_nll");
  require_batch(targets, mask, "gaussian_nll");
  for (double s : sigma.data())
    if (!(s > 0.0)) throw ArgumentError("gaussian_nll: standard deviation must be positive");
  const std::size_t batch = mean.dim(1), channels = mean.dim(2);
  LossResult r;
  r.per_sequence.assign(batch, 0.0);
  for (std::size_t t = 0; t < mean.dim(0); ++t) {
    for (std::size_t b = 0; b < batch; ++b) {
      if (mask.at(t, b) == 0.0) continue;
      for (std::size_t k = 0; k < channels; ++k) {
        const double sd = sigma.at(t, b, k);
        const double z = (targets.at(t, b, k) - mean.at(t, b, k)) / sd;
        r.per_sequence[b] += 0.5 * z * z + std::log(sd) + kHalfLog2Pi;
      }
    }
  }
  for (double v : r.per_sequence) r.total += v;
  return r;
}

}  // namespace storn
