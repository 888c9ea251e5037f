#include "storn/storn.hpp"

#include <cmath>
#include <random>

#include "storn/errors.hpp"
#include "storn/seed.hpp"

namespace storn {

ModelKind parse_model_kind(std::string_view s) {
  if (s == "storn") return ModelKind::storn;
  if (s == "srnn") return ModelKind::srnn;
  throw ConfigError("unknown model kind '" + std::string(s) + "' (expected storn or srnn)");
}

Likelihood parse_likelihood(std::string_view s) {
  if (s == "bernoulli") return Likelihood::bernoulli;
  if (s == "gaussian") return Likelihood::gaussian;
  throw ConfigError("unknown likelihood '" + std::string(s) + "' (expected bernoulli or gaussian)");
}

RecognitionMode parse_recognition_mode(std::string_view s) {
  if (s == "causal") return RecognitionMode::causal;
  if (s == "lagged") return RecognitionMode::lagged;
  if (s == "bidirectional") return RecognitionMode::bidirectional;
  throw ConfigError("unknown recognition mode '" + std::string(s) +
                    "' (expected causal, lagged or bidirectional)");
}

std::string_view to_string(ModelKind k) { return k == ModelKind::storn ? "storn" : "srnn"; }
std::string_view to_string(Likelihood l) { return l == Likelihood::bernoulli ? "bernoulli" : "gaussian"; }
std::string_view to_string(RecognitionMode r) {
  switch (r) {
    case RecognitionMode::causal: return "causal";
    case RecognitionMode::lagged: return "lagged";
    case RecognitionMode::bidirectional: return "bidirectional";
  }
  return "causal";
}

void ModelSpec::validate() const {
  if (input == 0) throw ConfigError("model.input must be positive");
  if (hidden == 0) throw ConfigError("model.hidden must be positive");
  if (has_latent()) {
    if (latent == 0) throw ConfigError("model.latent must be positive for a storn model");
    if (recog_hidden == 0) throw ConfigError("model.recog_hidden must be positive for a storn model");
  } else if (latent != 0) {
    throw ConfigError("model.latent must be 0 for an srnn model");
  }
  if (likelihood == Likelihood::gaussian && !(sigma_out > 0.0 && std::isfinite(sigma_out))) {
    throw ConfigError("model.sigma_out must be positive and finite");
  }
  if (!(sigma_floor > 0.0)) throw ConfigError("sigma floor must be positive");
  if (!(prob_clamp > 0.0 && prob_clamp < 0.5)) throw ConfigError("probability clamp must lie in (0, 0.5)");
}

namespace {

Transfer output_transfer(Likelihood l) {
  return l == Likelihood::bernoulli ? Transfer::logistic : Transfer::identity;
}

void check_input(const StornModel& m, const SequenceBatch& x) {
  if (x.values.rank() != 3 || x.features() != m.spec.input) {
    throw DimensionError("batch " + to_string(x.values.shape()) + " does not match model input width " +
                         std::to_string(m.spec.input));
  }
}

void check_latent(const StornModel& m, const SequenceBatch& x, const Tensor& t, const char* what) {
  const Shape want{x.steps(), x.batch(), m.spec.latent};
  if (t.shape() != want) {
    throw DimensionError(std::string(what) + " has shape " + to_string(t.shape()) + ", expected " +
                         to_string(want));
  }
}

std::vector<Tensor> slices(const Tensor& t) {
  std::vector<Tensor> out;
  out.reserve(t.dim(0));
  for (std::size_t i = 0; i < t.dim(0); ++i) out.push_back(t.slice(i));
  return out;
}

}  // namespace

StornModel make_model(const ModelSpec& spec, std::string_view init_scheme, std::uint64_t seed) {
  spec.validate();
  StornModel m;
  m.spec = spec;
  m.gen = init_params({spec.input, spec.hidden, spec.input}, init_scheme, derive_seed(seed, "gen"),
                      spec.gen_transfer, output_transfer(spec.likelihood));
  if (!spec.has_latent()) return m;

  m.w_latent = Tensor({spec.latent, spec.hidden});
  if (init_scheme == "default") {
    std::mt19937_64 rng(derive_seed(seed, "gen.w_latent"));
    const double limit = std::sqrt(6.0 / static_cast<double>(spec.latent + spec.hidden));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (auto& v : m.w_latent.data()) v = u(rng);
  }
  const RnnDims rd{spec.input, spec.recog_hidden, 2 * spec.latent};
  m.recog = init_params(rd, init_scheme, derive_seed(seed, "recog"), spec.recog_transfer, Transfer::identity);
  if (spec.bidirectional()) {
    m.recog_bwd =
        init_params(rd, init_scheme, derive_seed(seed, "recog_bwd"), spec.recog_transfer, Transfer::identity);
  }
  if (init_scheme == "default") {
    for (std::size_t k = spec.latent; k < 2 * spec.latent; ++k) m.recog.b_out[k] = 1.0;
  }
  return m;
}

void validate(const StornModel& m) {
  m.spec.validate();
  validate(m.gen);
  const RnnDims g = dims_of(m.gen);
  if (g.input != m.spec.input || g.output != m.spec.input || g.hidden != m.spec.hidden) {
    throw DimensionError("generating network extents disagree with the model spec");
  }
  if (!m.spec.has_latent()) return;
  if (m.w_latent.shape() != Shape{m.spec.latent, m.spec.hidden}) {
    throw DimensionError("latent input map " + to_string(m.w_latent.shape()) + " is not " +
                         std::to_string(m.spec.latent) + "x" + std::to_string(m.spec.hidden));
  }
  if (!m.w_latent.all_finite()) throw ValidationError("latent input map contains non-finite values");
  auto check_recog = [&](const RnnParams& r) {
    validate(r);
    const RnnDims d = dims_of(r);
    if (d.input != m.spec.input || d.hidden != m.spec.recog_hidden) {
      throw DimensionError("recognition network extents disagree with the model spec");
    }
    if (d.output != 2 * m.spec.latent) {
      throw DimensionError("recognition output width " + std::to_string(d.output) + " is not 2 x latent (" +
                           std::to_string(2 * m.spec.latent) + ")");
    }
  };
  check_recog(m.recog);
  if (m.spec.bidirectional()) check_recog(m.recog_bwd);
}

StornVars bind(ad::Tape& tape, const StornModel& m, bool trainable) {
  StornVars v;
  v.spec = m.spec;
  v.gen = bind(tape, m.gen, trainable);
  if (!m.spec.has_latent()) return v;
  v.w_latent = trainable ? tape.parameter(m.w_latent) : tape.constant(m.w_latent);
  v.recog = bind(tape, m.recog, trainable);
  if (m.spec.bidirectional()) v.recog_bwd = bind(tape, m.recog_bwd, trainable);
  return v;
}

NamedTensors parameters_of(const StornModel& m) {
  NamedTensors out;
  for_each_parameter(m, [&](const std::string& name, const Tensor& t) { out.emplace_back(name, t); });
  return out;
}

void assign_parameters(StornModel& m, const NamedTensors& params) {
  std::size_t expected = 0;
  for_each_parameter(m, [&](const std::string& name, Tensor& t) {
    ++expected;
    const Tensor& src = find_param(params, name);
    if (src.shape() != t.shape()) {
      throw DimensionError("parameter '" + name + "' has shape " + to_string(src.shape()) + ", expected " +
                           to_string(t.shape()));
    }
    t = src;
  });
  if (params.size() != expected) {
    throw ParseError("parameter set has " + std::to_string(params.size()) + " entries, model expects " +
                     std::to_string(expected));
  }
}

PosteriorStats recognition_forward(const StornModel& m, const SequenceBatch& x) {
  if (!m.spec.has_latent()) throw ArgumentError("srnn models have no recognition network");
  validate(m);
  check_input(m, x);
  const auto post = recognition_steps(m, x);
  return {stack_steps(post.mu), stack_steps(post.sigma)};
}

Tensor sample_latents(const PosteriorStats& stats, const Tensor& eps) {
  require_same_shape(stats.mu, stats.sigma, "sample_latents");
  require_same_shape(stats.mu, eps, "sample_latents");
  return add(stats.mu, mul(stats.sigma, eps));
}

Tensor generative_forward(const StornModel& m, const SequenceBatch& x, const Tensor& z) {
  validate(m);
  check_input(m, x);
  if (!m.spec.has_latent()) return stack_steps(generative_steps(m, x, static_cast<const std::vector<Tensor>*>(nullptr)));
  check_latent(m, x, z, "latent sample");
  const auto zs = slices(z);
  return stack_steps(generative_steps(m, x, &zs));
}

LossResult kl_standard_normal(const PosteriorStats& stats, const Tensor& mask) {
  require_same_shape(stats.mu, stats.sigma, "kl_standard_normal");
  if (stats.mu.rank() != 3 || mask.shape() != Shape{stats.mu.dim(0), stats.mu.dim(1)}) {
    throw DimensionError("mask " + to_string(mask.shape()) + " does not match posterior " +
                         to_string(stats.mu.shape()));
  }
  const std::size_t batch = stats.mu.dim(1);
  LossResult out{std::vector<double>(batch, 0.0), 0.0};
  for (std::size_t t = 0; t < stats.mu.dim(0); ++t) {
    const Tensor rows = kl_rows(stats.mu.slice(t), stats.sigma.slice(t), mask.data().subspan(t * batch, batch));
    for (std::size_t b = 0; b < batch; ++b) out.per_sequence[b] += rows[b];
  }
  for (double v : out.per_sequence) out.total += v;
  return out;
}

LossResult reconstruction_nll(const ModelSpec& spec, const Tensor& y, const SequenceBatch& x) {
  if (spec.likelihood == Likelihood::bernoulli) return bernoulli_nll(y, x.values, x.mask, spec.prob_clamp);
  return gaussian_nll(y, spec.sigma_out, x.values, x.mask);
}

Tensor generative_preactivation(const StornModel& m, const SequenceBatch& x, const Tensor& z) {
  validate(m);
  check_input(m, x);
  if (!m.spec.has_latent()) {
    return stack_steps(generative_preactivations(m, x, static_cast<const std::vector<Tensor>*>(nullptr)));
  }
  check_latent(m, x, z, "latent sample");
  const auto zs = slices(z);
  return stack_steps(generative_preactivations(m, x, &zs));
}

LossResult preactivation_nll(const ModelSpec& spec, const Tensor& pre, const SequenceBatch& x) {
  if (spec.likelihood == Likelihood::bernoulli) return bernoulli_logit_nll(pre, x.values, x.mask, spec.prob_clamp);
  return gaussian_nll(pre, spec.sigma_out, x.values, x.mask);
}

namespace {

BoundReport make_report(const SequenceBatch& x, const Tensor& kl, const Tensor& recon) {
  BoundReport r;
  const std::size_t batch = x.batch();
  for (std::size_t b = 0; b < batch; ++b) {
    r.kl.push_back(kl[b]);
    r.recon_nll.push_back(recon[b]);
    r.bound.push_back(kl[b] + recon[b]);
    r.lengths.push_back(x.length(b));
    r.kl_total += kl[b];
    r.recon_total += recon[b];
    r.bound_total += r.bound.back();
    r.steps += r.lengths.back();
  }
  return r;
}

void check_bound_inputs(const StornModel& m, const SequenceBatch& x, const Tensor& eps) {
  validate(m);
  check_input(m, x);
  if (m.spec.has_latent()) check_latent(m, x, eps, "noise");
}

}  // namespace

BoundReport storn_bound(const StornModel& m, const SequenceBatch& x, const Tensor& eps) {
  check_bound_inputs(m, x, eps);
  const auto terms = bound_terms(m, x, eps);
  return make_report(x, terms.kl, terms.recon);
}

LossResult srnn_nll(const StornModel& m, const SequenceBatch& x) {
  validate(m);
  check_input(m, x);
  const auto pre = generative_preactivations(m, x, static_cast<const std::vector<Tensor>*>(nullptr));
  return preactivation_nll(m.spec, stack_steps(pre), x);
}

BoundGradients storn_bound_gradients(const StornModel& m, const SequenceBatch& x, const Tensor& eps) {
  check_bound_inputs(m, x, eps);
  if (x.batch() == 0) throw ArgumentError("empty batch");
  ad::Tape tape;
  const StornVars v = bind(tape, m, true);
  const auto terms = bound_terms(v, x, eps);
  const ad::Var loss = ad::scale(ad::sum(ad::add(terms.kl, terms.recon)), 1.0 / static_cast<double>(x.batch()));

  BoundGradients out;
  out.report = make_report(x, terms.kl.value(), terms.recon.value());
  out.loss = loss.value().item();
  const auto grads = tape.backward(loss);
  for_each_parameter(v, [&](const std::string& name, const ad::Var& p) { out.grads.emplace_back(name, grads.of(p)); });
  return out;
}

Tensor generative_step(const StornModel& m, const Tensor& x_prev, const Tensor* z, const Tensor& h_prev,
                       std::span<const double> mask, Tensor& y) {
  Tensor extra;
  if (z) extra = matmul(*z, m.w_latent);
  Tensor h = hidden_step(m.gen, x_prev, h_prev, z ? &extra : nullptr, mask);
  y = scale_rows(apply_transfer(output_preactivation(m.gen, h), m.gen.output), mask);
  return h;
}

}  // namespace storn
