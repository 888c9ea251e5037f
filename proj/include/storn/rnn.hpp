#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <type_traits>
#include <vector>

#include "storn/autodiff.hpp"
#include "storn/ops.hpp"
#include "storn/sequence.hpp"
#include "storn/tensor.hpp"

namespace storn {

/// Weights of a simple recurrent network
///
///   h_t = f_h(x_t W_in + h_{t-1} W_rec + b_hid)
///   y_t = f_y(h_t W_out + b_out)
///
/// generic over the value type: Tensor for plain evaluation, ad::Var when the
/// forward pass is recorded for differentiation.
template <class V>
struct BasicRnn {
  V w_in;   // input x hidden
  V w_rec;  // hidden x hidden
  V w_out;  // hidden x output
  V b_hid;  // hidden
  V b_out;  // output
  Transfer hidden = Transfer::logistic;
  Transfer output = Transfer::logistic;
};

using RnnParams = BasicRnn<Tensor>;
using RnnVars = BasicRnn<ad::Var>;

struct RnnDims {
  std::size_t input = 0;
  std::size_t hidden = 0;
  std::size_t output = 0;
};

RnnDims dims_of(const RnnParams& p);

/// Throws DimensionError/ValidationError on inconsistent extents or
/// non-finite weights.
void validate(const RnnParams& p);

/// Records the five weight groups on `tape`, as parameters when `trainable`.
RnnVars bind(ad::Tape& tape, const RnnParams& p, bool trainable);

/// "default": uniform +-sqrt(6 / (fan_in + fan_out)) for input and output
/// maps, a Gaussian recurrent matrix rescaled to spectral radius 1, zero
/// biases. "zero": everything zero. Anything else is a ConfigError.
RnnParams init_params(const RnnDims& dims, std::string_view scheme, std::uint64_t seed,
                      Transfer hidden = Transfer::logistic, Transfer output = Transfer::logistic);

/// Largest eigenvalue modulus of a square matrix.
double spectral_radius(const Tensor& square);

struct RnnOutput {
  Tensor hidden;   // T x B x hidden
  Tensor outputs;  // T x B x output
};

RnnOutput rnn_forward(const RnnParams& p, const SequenceBatch& inputs,
                      const std::optional<Tensor>& h0 = std::nullopt);

/// Forward half left to right, backward half right to left over the valid
/// span; the output pre-activations of both halves are summed and passed
/// through the forward half's output transfer.
Tensor birnn_forward(const RnnParams& fwd, const RnnParams& bwd, const SequenceBatch& inputs);

// Generic recurrences shared by the plain and the recorded paths.

/// Per-step time slices of a batch, lifted into the value space of `like`.
template <class V>
std::vector<V> step_values(const V& like, const Tensor& values) {
  std::vector<V> out;
  out.reserve(values.dim(0));
  for (std::size_t t = 0; t < values.dim(0); ++t) out.push_back(lift(like, values.slice(t)));
  return out;
}

/// One hidden update. `extra` adds to the pre-activation (latent input);
/// rows with mask 0 keep `h_prev`.
template <class V>
V hidden_step(const BasicRnn<V>& p, const V& x, const V& h_prev, const V* extra,
              std::span<const double> mask) {
  V pre = add(matmul(x, p.w_in), matmul(h_prev, p.w_rec));
  if (extra) pre = add(pre, *extra);
  V h = apply_transfer(add_row(pre, p.b_hid), p.hidden);
  return blend_rows(h, h_prev, mask);
}

template <class V>
V output_preactivation(const BasicRnn<V>& p, const V& h) {
  return add_row(matmul(h, p.w_out), p.b_out);
}

/// Runs the hidden recurrence over all steps, right to left when `reverse`.
template <class V>
std::vector<V> run_hidden(const BasicRnn<V>& p, const std::vector<V>& inputs,
                          const std::type_identity_t<std::vector<V>>* extras, const Tensor& mask,
                          const std::type_identity_t<V>& h0,
                          bool reverse = false) {
  const std::size_t steps = inputs.size();
  const std::size_t batch = mask.dim(1);
  std::vector<V> hidden(steps);
  V h = h0;
  for (std::size_t i = 0; i < steps; ++i) {
    const std::size_t t = reverse ? steps - 1 - i : i;
    const auto m = mask.data().subspan(t * batch, batch);
    h = hidden_step(p, inputs[t], h, extras ? &(*extras)[t] : nullptr, m);
    hidden[t] = h;
  }
  return hidden;
}

template <class V>
V zero_state(const V& like, std::size_t batch, std::size_t units) {
  return lift(like, Tensor({batch, units}));
}

/// Unidirectional outputs, zero on masked steps.
template <class V>
std::vector<V> rnn_outputs(const BasicRnn<V>& p, const std::vector<V>& inputs, const Tensor& mask) {
  const std::size_t batch = mask.dim(1);
  const auto hidden = run_hidden(p, inputs, nullptr, mask,
                                 zero_state(p.w_rec, batch, value_of(p.w_rec).dim(0)));
  std::vector<V> out;
  out.reserve(hidden.size());
  for (std::size_t t = 0; t < hidden.size(); ++t) {
    const auto m = mask.data().subspan(t * batch, batch);
    out.push_back(scale_rows(apply_transfer(output_preactivation(p, hidden[t]), p.output), m));
  }
  return out;
}

template <class V>
std::vector<V> birnn_outputs(const BasicRnn<V>& fwd, const BasicRnn<V>& bwd,
                             const std::vector<V>& inputs, const Tensor& mask) {
  const std::size_t batch = mask.dim(1);
  const auto hf = run_hidden(fwd, inputs, nullptr, mask,
                             zero_state(fwd.w_rec, batch, value_of(fwd.w_rec).dim(0)));
  const auto hb = run_hidden(bwd, inputs, nullptr, mask,
                             zero_state(bwd.w_rec, batch, value_of(bwd.w_rec).dim(0)), true);
  std::vector<V> out;
  out.reserve(inputs.size());
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const auto m = mask.data().subspan(t * batch, batch);
    V pre = add(output_preactivation(fwd, hf[t]), output_preactivation(bwd, hb[t]));
    out.push_back(scale_rows(apply_transfer(pre, fwd.output), m));
  }
  return out;
}

/// Stacks per-step rank-2 values into a time x batch x width tensor.
template <class V>
Tensor stack_steps(const std::vector<V>& steps) {
  if (steps.empty()) return Tensor({0, 0, 0});
  const Tensor& first = value_of(steps.front());
  Tensor out({steps.size(), first.rows(), first.cols()});
  for (std::size_t t = 0; t < steps.size(); ++t) out.set_slice(t, value_of(steps[t]));
  return out;
}

}  // namespace storn
