#pragma once

// Random models and batches shared by the unit and acceptance suites.

#include <random>
#include <vector>

#include "storn/data.hpp"
#include "storn/numeric.hpp"
#include "storn/storn.hpp"

namespace storn::testing {

inline void fill_uniform(Tensor& t, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  for (auto& v : t.data()) v = u(rng);
}

inline void fill_normal(Tensor& t, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  for (auto& v : t.data()) v = n(rng);
}

/// Batch of `lengths.size()` sequences, real-valued in [-2, 2] or binary.
inline SequenceBatch random_batch(std::size_t features, const std::vector<std::size_t>& lengths,
                                  std::mt19937_64& rng, bool binary = false) {
  std::vector<Tensor> seqs;
  for (std::size_t len : lengths) {
    Tensor s({len, features});
    if (binary) {
      std::bernoulli_distribution coin(0.5);
      for (auto& v : s.data()) v = coin(rng) ? 1.0 : 0.0;
    } else {
      fill_uniform(s, rng, -2.0, 2.0);
    }
    seqs.push_back(std::move(s));
  }
  return SequenceBatch::from_sequences(seqs);
}

inline Tensor standard_normal(const Shape& shape, std::mt19937_64& rng) {
  Tensor t(shape);
  fill_normal(t, rng);
  return t;
}

/// Default-initialised model with every bias randomised too, so no gradient
/// component is structurally zero.
inline StornModel random_model(const ModelSpec& spec, std::mt19937_64& rng, double bias_scale = 0.5) {
  StornModel m = make_model(spec, "default", rng());
  for_each_parameter(m, [&](const std::string& name, Tensor& t) {
    if (name.find(".b_") != std::string::npos) {
      Tensor noise(t.shape());
      fill_uniform(noise, rng, -bias_scale, bias_scale);
      t = add(t, noise);
    }
  });
  return m;
}

/// Largest relative disagreement after the absolute floor, and whether all
/// components passed.
struct GradCheck {
  bool ok = true;
  double worst = 0.0;
  std::size_t compared = 0;
};

inline GradCheck compare_gradients(const NamedTensors& analytic, const std::vector<Tensor>& numeric) {
  GradCheck out;
  for (std::size_t g = 0; g < analytic.size(); ++g) {
    const Tensor& a = analytic[g].second;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ++out.compared;
      if (!gradient_close(a[i], numeric[g][i])) {
        out.ok = false;
        out.worst = std::max(out.worst, relative_error(a[i], numeric[g][i]));
      }
    }
  }
  return out;
}

/// Reverse-mode bound gradient against central differences, eps fixed.
inline GradCheck check_bound_gradient(const StornModel& m, const SequenceBatch& x, const Tensor& eps) {
  const BoundGradients bg = storn_bound_gradients(m, x, eps);
  std::vector<Tensor> flat;
  for (const auto& [name, t] : parameters_of(m)) flat.push_back(t);
  auto loss_of = [&](const std::vector<Tensor>& values) {
    StornModel copy = m;
    NamedTensors named = parameters_of(m);
    for (std::size_t i = 0; i < named.size(); ++i) named[i].second = values[i];
    assign_parameters(copy, named);
    return storn_bound(copy, x, eps).bound_total / static_cast<double>(x.batch());
  };
  return compare_gradients(bg.grads, finite_difference_grad(loss_of, flat, 1e-5));
}

/// Scalar generating network matching synth_linear_gaussian. The recognition
/// network outputs the prior (mu = 0, sigma ~ 1) for every input.
inline StornModel linear_gaussian_model(const LinearGaussianParams& p, RecognitionMode mode = RecognitionMode::causal) {
  ModelSpec s;
  s.input = 1;
  s.hidden = 1;
  s.recog_hidden = 2;
  s.latent = 1;
  s.gen_transfer = Transfer::identity;
  s.likelihood = Likelihood::gaussian;
  s.sigma_out = p.sigma_out;
  s.recognition = mode;
  StornModel m = make_model(s, "zero", 0);
  m.gen.w_in = Tensor::matrix({{p.w_in}});
  m.gen.w_rec = Tensor::matrix({{p.w_rec}});
  m.gen.w_out = Tensor::matrix({{p.w_out}});
  m.gen.b_hid = Tensor::vector({p.b_hid});
  m.gen.b_out = Tensor::vector({p.b_out});
  m.w_latent = Tensor::matrix({{p.w_lat}});
  m.recog.b_out = Tensor::vector({0.0, 1.0});
  return m;
}

}  // namespace storn::testing
