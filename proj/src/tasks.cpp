#include "storn/tasks.hpp"

#include <random>

#include "storn/errors.hpp"
#include "storn/seed.hpp"

namespace storn {

namespace {

std::vector<std::size_t> window_channels(const CorruptionSpec& spec, std::size_t features) {
  if (!spec.channels.empty()) return spec.channels;
  std::vector<std::size_t> all(features);
  for (std::size_t k = 0; k < features; ++k) all[k] = k;
  return all;
}

void check_model_input(const StornModel& m, const SequenceBatch& x) {
  validate(m);
  if (x.values.rank() != 3 || x.features() != m.spec.input) {
    throw DimensionError("batch " + to_string(x.values.shape()) + " does not match model input width " +
                         std::to_string(m.spec.input));
  }
}

double argmax_value(const ModelSpec& spec, double y) {
  if (spec.likelihood == Likelihood::bernoulli) return y >= 0.5 ? 1.0 : 0.0;
  return y;
}

}  // namespace

void check_window(const CorruptionSpec& spec, const SequenceBatch& x) {
  if (spec.start > spec.end) {
    throw ArgumentError("window start " + std::to_string(spec.start) + " exceeds end " + std::to_string(spec.end));
  }
  for (std::size_t b = 0; b < x.batch(); ++b) {
    if (spec.end > x.length(b)) {
      throw ArgumentError("window [" + std::to_string(spec.start) + ", " + std::to_string(spec.end) +
                          ") extends past sequence " + std::to_string(b) + " of length " +
                          std::to_string(x.length(b)));
    }
  }
  for (std::size_t k : spec.channels) {
    if (k >= x.features()) throw ArgumentError("window channel " + std::to_string(k) + " does not exist");
  }
}

SequenceBatch corrupt(const SequenceBatch& x, const CorruptionSpec& spec, std::size_t index_offset) {
  check_window(spec, x);
  SequenceBatch out = x;
  const auto chans = window_channels(spec, x.features());
  for (std::size_t b = 0; b < x.batch(); ++b) {
    std::mt19937_64 rng(stream_seed(spec.seed, index_offset + b));
    std::normal_distribution<double> n01;
    for (std::size_t t = spec.start; t < spec.end; ++t)
      for (std::size_t k : chans) out.values.at(t, b, k) = n01(rng);
  }
  return out;
}

SequenceBatch impute(const StornModel& m, const SequenceBatch& corrupted, const CorruptionSpec& spec) {
  check_model_input(m, corrupted);
  check_window(spec, corrupted);
  SequenceBatch out = corrupted;
  if (spec.start == spec.end) return out;

  const std::size_t B = corrupted.batch(), K = corrupted.features();
  std::vector<bool> in_set(K, spec.channels.empty());
  for (std::size_t k : spec.channels) in_set[k] = true;

  Tensor mu;
  if (m.spec.has_latent()) mu = recognition_forward(m, corrupted).mu;
  Tensor h({B, m.spec.hidden}), prev({B, K}), y;
  for (std::size_t t = 0; t < spec.end; ++t) {
    const Tensor zt = m.spec.has_latent() ? mu.slice(t) : Tensor();
    h = generative_step(m, prev, m.spec.has_latent() ? &zt : nullptr, h, corrupted.mask_row(t), y);
    if (t >= spec.start) {
      for (std::size_t b = 0; b < B; ++b)
        for (std::size_t k = 0; k < K; ++k)
          if (in_set[k]) out.values.at(t, b, k) = argmax_value(m.spec, y.at(b, k));
    }
    prev = out.values.slice(t);
  }
  return out;
}

SequenceBatch generate(const StornModel& m, const SequenceBatch& prefix, std::size_t horizon, std::uint64_t seed) {
  check_model_input(m, prefix);
  const std::size_t B = prefix.batch(), K = prefix.features();
  std::vector<Tensor> seqs;
  for (std::size_t b = 0; b < B; ++b) {
    const std::size_t L = prefix.length(b), total = L + horizon;
    Tensor seq({total, K});
    for (std::size_t t = 0; t < L; ++t)
      for (std::size_t k = 0; k < K; ++k) seq.at(t, k) = prefix.values.at(t, b, k);
    if (horizon > 0) {
      std::mt19937_64 rng(stream_seed(seed, b));
      std::normal_distribution<double> n01;
      const std::vector<double> valid{1.0};
      Tensor h({1, m.spec.hidden}), prev({1, K}), z({1, m.spec.latent}), y;
      for (std::size_t t = 0; t < total; ++t) {
        for (auto& v : z.data()) v = n01(rng);
        h = generative_step(m, prev, m.spec.has_latent() ? &z : nullptr, h, valid, y);
        if (t >= L) {
          for (std::size_t k = 0; k < K; ++k) seq.at(t, k) = y[k];
        }
        for (std::size_t k = 0; k < K; ++k) prev[k] = seq.at(t, k);
      }
    }
    seqs.push_back(std::move(seq));
  }
  if (seqs.empty()) return prefix;
  return SequenceBatch::from_sequences(seqs);
}

double mse(const SequenceBatch& pred, const SequenceBatch& target) {
  require_same_shape(pred.values, target.values, "mse");
  require_same_shape(pred.mask, target.mask, "mse");
  double s = 0.0;
  std::size_t n = 0;
  const std::size_t K = pred.features();
  for (std::size_t t = 0; t < pred.steps(); ++t) {
    for (std::size_t b = 0; b < pred.batch(); ++b) {
      if (pred.mask.at(t, b) * target.mask.at(t, b) == 0.0) continue;
      for (std::size_t k = 0; k < K; ++k) {
        const double d = pred.values.at(t, b, k) - target.values.at(t, b, k);
        s += d * d;
      }
      n += K;
    }
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

std::vector<double> window_mse(const SequenceBatch& pred, const SequenceBatch& target, const CorruptionSpec& spec) {
  require_same_shape(pred.values, target.values, "window_mse");
  check_window(spec, target);
  const auto chans = window_channels(spec, target.features());
  std::vector<double> out(target.batch(), 0.0);
  const std::size_t n = (spec.end - spec.start) * chans.size();
  if (n == 0) return out;
  for (std::size_t b = 0; b < target.batch(); ++b) {
    double s = 0.0;
    for (std::size_t t = spec.start; t < spec.end; ++t)
      for (std::size_t k : chans) {
        const double d = pred.values.at(t, b, k) - target.values.at(t, b, k);
        s += d * d;
      }
    out[b] = s / static_cast<double>(n);
  }
  return out;
}

double one_step_mse(const StornModel& m, const SequenceBatch& x, OneStepMode mode) {
  check_model_input(m, x);
  if (m.spec.likelihood != Likelihood::gaussian) throw ArgumentError("one_step_mse needs a gaussian likelihood");
  Tensor z;
  if (m.spec.has_latent()) {
    z = mode == OneStepMode::map_latent ? recognition_forward(m, x).mu
                                        : Tensor({x.steps(), x.batch(), m.spec.latent});
  }
  return mse(SequenceBatch{generative_forward(m, x, z), x.mask}, x);
}

}  // namespace storn
