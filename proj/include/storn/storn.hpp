#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "storn/autodiff.hpp"
#include "storn/params_io.hpp"
#include "storn/rnn.hpp"
#include "storn/sequence.hpp"

namespace storn {

inline constexpr double kSigmaFloor = 1e-6;

/// srnn is the factorised baseline: the generating network alone, no latent
/// variables and no recognition network.
enum class ModelKind { storn, srnn };
enum class Likelihood { bernoulli, gaussian };
/// causal: q(z_t | x_{1:t}); lagged: q(z_t | x_{1:t-1}); bidirectional:
/// q(z_t | x_{1:T}).
enum class RecognitionMode { causal, lagged, bidirectional };

ModelKind parse_model_kind(std::string_view s);
Likelihood parse_likelihood(std::string_view s);
RecognitionMode parse_recognition_mode(std::string_view s);
std::string_view to_string(ModelKind k);
std::string_view to_string(Likelihood l);
std::string_view to_string(RecognitionMode r);

struct ModelSpec {
  ModelKind kind = ModelKind::storn;
  std::size_t input = 0;         // observation width, also the prediction width
  std::size_t hidden = 0;        // generating network units
  std::size_t recog_hidden = 0;  // recognition network units (per direction)
  std::size_t latent = 0;        // latent width, 0 for srnn
  Transfer gen_transfer = Transfer::tanh;
  Transfer recog_transfer = Transfer::tanh;
  Likelihood likelihood = Likelihood::bernoulli;
  double sigma_out = 1.0;  // gaussian likelihood only
  RecognitionMode recognition = RecognitionMode::causal;
  double sigma_floor = kSigmaFloor;
  double prob_clamp = kProbClamp;

  bool has_latent() const { return kind == ModelKind::storn; }
  bool bidirectional() const { return has_latent() && recognition == RecognitionMode::bidirectional; }
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Generating network (with latent-input map w_latent, latent x hidden) and
/// recognition network (output width 2 * latent: means, then raw scales).
/// `recog_bwd` is used only in bidirectional mode.
template <class V>
struct BasicStorn {
  ModelSpec spec;
  BasicRnn<V> gen;
  V w_latent;
  BasicRnn<V> recog;
  BasicRnn<V> recog_bwd;
};

using StornModel = BasicStorn<Tensor>;
using StornVars = BasicStorn<ad::Var>;

/// Visits the trainable tensors in a fixed order with stable names.
template <class Model, class F>
void for_each_parameter(Model& m, F&& f) {
  auto rnn = [&](const std::string& prefix, auto& r) {
    f(prefix + ".w_in", r.w_in);
    f(prefix + ".w_rec", r.w_rec);
    f(prefix + ".w_out", r.w_out);
    f(prefix + ".b_hid", r.b_hid);
    f(prefix + ".b_out", r.b_out);
  };
  rnn("gen", m.gen);
  if (!m.spec.has_latent()) return;
  f(std::string("gen.w_latent"), m.w_latent);
  rnn("recog", m.recog);
  if (m.spec.bidirectional()) rnn("recog_bwd", m.recog_bwd);
}

/// Fresh model. The recognition scale biases start at 1 so that the initial
/// posterior is close to the prior.
StornModel make_model(const ModelSpec& spec, std::string_view init_scheme, std::uint64_t seed);

void validate(const StornModel& m);
StornVars bind(ad::Tape& tape, const StornModel& m, bool trainable);

NamedTensors parameters_of(const StornModel& m);
/// Replaces every trainable tensor; names and shapes must match exactly.
void assign_parameters(StornModel& m, const NamedTensors& params);

struct PosteriorStats {
  Tensor mu;     // T x B x latent
  Tensor sigma;  // T x B x latent, > 0
};

struct BoundReport {
  std::vector<double> kl;         // per sequence
  std::vector<double> recon_nll;  // per sequence
  std::vector<double> bound;      // kl + recon_nll
  std::vector<std::size_t> lengths;
  double kl_total = 0.0;
  double recon_total = 0.0;
  double bound_total = 0.0;
  std::size_t steps = 0;  // valid steps in the batch
};

PosteriorStats recognition_forward(const StornModel& m, const SequenceBatch& x);
Tensor sample_latents(const PosteriorStats& stats, const Tensor& eps);
/// Output y_t parameterises x_t given x_{1:t-1} and z_{1:t}. `z` may be
/// empty for srnn models.
Tensor generative_forward(const StornModel& m, const SequenceBatch& x, const Tensor& z);
LossResult kl_standard_normal(const PosteriorStats& stats, const Tensor& mask);
/// Masked NLL of x under generating outputs y.
LossResult reconstruction_nll(const ModelSpec& spec, const Tensor& y, const SequenceBatch& x);
/// Output pre-activations (T x B x input) matching generative_forward.
Tensor generative_preactivation(const StornModel& m, const SequenceBatch& x, const Tensor& z);
/// Masked NLL of x from output pre-activations; evaluated in logit space for
/// bernoulli outputs.
LossResult preactivation_nll(const ModelSpec& spec, const Tensor& pre, const SequenceBatch& x);
/// Single-sample bound with fixed noise eps (T x B x latent; ignored for srnn).
BoundReport storn_bound(const StornModel& m, const SequenceBatch& x, const Tensor& eps);
/// Exact NLL of the generating network with the latent input removed.
LossResult srnn_nll(const StornModel& m, const SequenceBatch& x);

struct BoundGradients {
  BoundReport report;
  double loss = 0.0;    // batch mean of per-sequence bounds
  NamedTensors grads;   // parameters_of order
};

/// Gradient of the batch-mean bound with respect to every trainable tensor.
BoundGradients storn_bound_gradients(const StornModel& m, const SequenceBatch& x, const Tensor& eps);

/// One generating step on plain tensors: returns the new hidden state and
/// writes the output into `y`. `z` may be null.
Tensor generative_step(const StornModel& m, const Tensor& x_prev, const Tensor* z, const Tensor& h_prev,
                       std::span<const double> mask, Tensor& y);

// Generic pieces shared by the plain and recorded paths.

template <class V>
struct PosteriorSteps {
  std::vector<V> mu;
  std::vector<V> sigma;
};

template <class V>
PosteriorSteps<V> recognition_steps(const BasicStorn<V>& m, const SequenceBatch& x) {
  const std::size_t lam = m.spec.latent;
  std::vector<V> y;
  if (m.spec.recognition == RecognitionMode::bidirectional) {
    y = birnn_outputs(m.recog, m.recog_bwd, step_values(m.recog.w_in, x.values), x.mask);
  } else if (m.spec.recognition == RecognitionMode::lagged) {
    y = rnn_outputs(m.recog, step_values(m.recog.w_in, shift_right(x).values), x.mask);
  } else {
    y = rnn_outputs(m.recog, step_values(m.recog.w_in, x.values), x.mask);
  }
  PosteriorSteps<V> out;
  for (const V& yt : y) {
    out.mu.push_back(columns(yt, 0, lam));
    out.sigma.push_back(posterior_sigma(columns(yt, lam, 2 * lam), m.spec.sigma_floor));
  }
  return out;
}

/// Unmasked output pre-activations: logits for bernoulli, means for gaussian.
template <class V>
std::vector<V> generative_preactivations(const BasicStorn<V>& m, const SequenceBatch& x, const std::vector<V>* z) {
  const auto inputs = step_values(m.gen.w_in, shift_right(x).values);
  std::vector<V> extras;
  if (z) {
    extras.reserve(z->size());
    for (const V& zt : *z) extras.push_back(matmul(zt, m.w_latent));
  }
  const std::size_t batch = x.batch();
  const auto hidden = run_hidden(m.gen, inputs, z ? &extras : nullptr, x.mask,
                                 zero_state(m.gen.w_rec, batch, m.spec.hidden));
  std::vector<V> out;
  out.reserve(hidden.size());
  for (const V& h : hidden) out.push_back(output_preactivation(m.gen, h));
  return out;
}

template <class V>
std::vector<V> generative_steps(const BasicStorn<V>& m, const SequenceBatch& x, const std::vector<V>* z) {
  auto out = generative_preactivations(m, x, z);
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t] = scale_rows(apply_transfer(out[t], m.gen.output), x.mask_row(t));
  }
  return out;
}

/// Per-row NLL from output pre-activations.
template <class V>
V recon_rows(const ModelSpec& spec, const V& pre, const Tensor& target, std::span<const double> mask) {
  if (spec.likelihood == Likelihood::bernoulli) return bernoulli_logit_nll_rows(pre, target, mask, spec.prob_clamp);
  return gaussian_nll_rows(pre, target, spec.sigma_out, mask);
}

/// Per-sequence KL and reconstruction terms, each of shape {B}.
template <class V>
struct BoundTerms {
  V kl;
  V recon;
};

template <class V>
BoundTerms<V> bound_terms(const BasicStorn<V>& m, const SequenceBatch& x, const Tensor& eps) {
  const std::size_t steps = x.steps(), batch = x.batch();
  BoundTerms<V> terms{lift(m.gen.w_in, Tensor({batch})), lift(m.gen.w_in, Tensor({batch}))};
  std::vector<V> ys;
  if (m.spec.has_latent()) {
    const auto post = recognition_steps(m, x);
    std::vector<V> z;
    z.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      z.push_back(add(post.mu[t], mul(post.sigma[t], eps.slice(t))));
      terms.kl = add(terms.kl, kl_rows(post.mu[t], post.sigma[t], x.mask_row(t)));
    }
    ys = generative_preactivations(m, x, &z);
  } else {
    ys = generative_preactivations(m, x, static_cast<const std::vector<V>*>(nullptr));
  }
  for (std::size_t t = 0; t < steps; ++t) {
    terms.recon = add(terms.recon, recon_rows(m.spec, ys[t], x.values.slice(t), x.mask_row(t)));
  }
  return terms;
}

}  // namespace storn
