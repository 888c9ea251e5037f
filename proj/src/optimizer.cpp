#include "storn/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "storn/errors.hpp"
#include "storn/seed.hpp"

namespace storn {

void AdadeltaConfig::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("train.rho must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("train.epsilon must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("train.momentum must lie in [0, 1)");
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("train.batch_size must be at least 1");
  if (!(clip > 0.0)) throw ConfigError("train.clip must be positive");
  optimizer.validate();
}

AdadeltaState make_adadelta_state(const NamedTensors& params, const AdadeltaConfig& config) {
  config.validate();
  AdadeltaState st{config, {}};
  for (const auto& [name, p] : params) {
    st.slots.push_back({Tensor(p.shape()), Tensor(p.shape()), Tensor(p.shape())});
  }
  return st;
}

namespace {

void check_aligned(const NamedTensors& params, const NamedTensors& grads, const AdadeltaState& st) {
  if (params.size() != grads.size() || params.size() != st.slots.size()) {
    throw DimensionError("optimizer: " + std::to_string(params.size()) + " parameters, " +
                         std::to_string(grads.size()) + " gradients, " + std::to_string(st.slots.size()) +
                         " state slots");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Shape& s = params[i].second.shape();
    if (grads[i].second.shape() != s || st.slots[i].velocity.shape() != s) {
      throw DimensionError("optimizer: shape mismatch for '" + params[i].first + "': parameter " + to_string(s) +
                           ", gradient " + to_string(grads[i].second.shape()));
    }
  }
}

}  // namespace

void adadelta_step(NamedTensors& params, const NamedTensors& grads, AdadeltaState& state) {
  check_aligned(params, grads, state);
  const double rho = state.config.rho, eps = state.config.epsilon, m = state.config.momentum;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto theta = params[i].second.data();
    const auto g = grads[i].second.data();
    auto& slot = state.slots[i];
    auto eg = slot.sq_grad.data();
    auto ed = slot.sq_step.data();
    auto v = slot.velocity.data();
    for (std::size_t j = 0; j < theta.size(); ++j) {
      eg[j] = rho * eg[j] + (1.0 - rho) * g[j] * g[j];
      const double step = -(std::sqrt(ed[j] + eps) / std::sqrt(eg[j] + eps)) * g[j];
      ed[j] = rho * ed[j] + (1.0 - rho) * step * step;
      v[j] = m * v[j] + step;
      theta[j] = theta[j] + v[j];
    }
  }
}

NamedTensors lookahead(const NamedTensors& params, const AdadeltaState& state) {
  if (params.size() != state.slots.size()) throw DimensionError("optimizer state does not match parameters");
  NamedTensors out = params;
  if (state.config.momentum == 0.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].second = add(out[i].second, scale(state.slots[i].velocity, state.config.momentum));
  }
  return out;
}

double global_norm(const NamedTensors& grads) {
  double s = 0.0;
  for (const auto& [name, g] : grads)
    for (double v : g.data()) s += v * v;
  return std::sqrt(s);
}

double clip_gradients(NamedTensors& grads, double threshold) {
  if (!(threshold > 0.0)) throw ArgumentError("clip threshold must be positive");
  const double norm = global_norm(grads);
  if (norm > threshold) {
    const double f = threshold / norm;
    for (auto& [name, g] : grads)
      for (auto& v : g.data()) v *= f;
  }
  return norm;
}

Tensor batch_noise(std::size_t steps, std::size_t latent, const std::vector<std::size_t>& indices,
                   std::uint64_t seed) {
  const std::size_t batch = indices.size();
  Tensor eps({steps, batch, latent});
  for (std::size_t b = 0; b < batch; ++b) {
    std::mt19937_64 rng(stream_seed(seed, indices[b]));
    std::normal_distribution<double> n01;
    for (std::size_t t = 0; t < steps; ++t)
      for (std::size_t k = 0; k < latent; ++k) eps.at(t, b, k) = n01(rng);
  }
  return eps;
}

namespace {

void append(BoundReport& into, const BoundReport& r) {
  into.kl.insert(into.kl.end(), r.kl.begin(), r.kl.end());
  into.recon_nll.insert(into.recon_nll.end(), r.recon_nll.begin(), r.recon_nll.end());
  into.bound.insert(into.bound.end(), r.bound.begin(), r.bound.end());
  into.lengths.insert(into.lengths.end(), r.lengths.begin(), r.lengths.end());
  into.kl_total += r.kl_total;
  into.recon_total += r.recon_total;
  into.bound_total += r.bound_total;
  into.steps += r.steps;
}

double per_step(double total, std::size_t steps) { return steps ? total / static_cast<double>(steps) : 0.0; }

/// Names the first non-finite quantity, or returns empty.
std::string first_non_finite(const BoundReport& r, const NamedTensors& grads) {
  for (double v : r.kl)
    if (!std::isfinite(v)) return "kl term";
  for (double v : r.recon_nll)
    if (!std::isfinite(v)) return "reconstruction term";
  for (const auto& [name, g] : grads)
    if (!g.all_finite()) return "gradient of '" + name + "'";
  return {};
}

}  // namespace

BoundReport evaluate_bound(const StornModel& m, const Dataset& ds, std::uint64_t seed, std::size_t batch_size) {
  BoundReport total;
  for (const Batch& b : ordered_batches(ds, batch_size)) {
    const Tensor eps = batch_noise(b.data.steps(), m.spec.latent, b.indices, seed);
    append(total, storn_bound(m, b.data, eps));
  }
  return total;
}

FitResult fit(const StornModel& init, const Dataset& train, const Dataset& validation, const TrainConfig& config,
              const EpochCallback& on_epoch) {
  config.validate();
  validate(init);
  if (train.empty()) throw ArgumentError("fit needs a non-empty training set");
  if (train.channels != init.spec.input || (!validation.empty() && validation.channels != init.spec.input)) {
    throw DimensionError("data width does not match model input width " + std::to_string(init.spec.input));
  }

  const std::uint64_t shuffle_seed = derive_seed(config.seed, "shuffle");
  const std::uint64_t eps_seed = derive_seed(config.seed, "eps");
  const std::uint64_t eval_seed = derive_seed(config.seed, "eval");

  FitResult res{init, {}, 0, std::numeric_limits<double>::infinity(), false};
  StornModel model = init;
  NamedTensors params = parameters_of(model);
  AdadeltaState state = make_adadelta_state(params, config.optimizer);
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    BoundReport epoch_report;
    std::size_t batch_no = 0;
    const std::uint64_t epoch_eps = stream_seed(eps_seed, epoch);
    for (const Batch& b : make_batches(train, config.batch_size, stream_seed(shuffle_seed, epoch))) {
      ++batch_no;
      StornModel ahead = model;
      assign_parameters(ahead, lookahead(params, state));
      const Tensor eps = batch_noise(b.data.steps(), model.spec.latent, b.indices, epoch_eps);
      BoundGradients bg = storn_bound_gradients(ahead, b.data, eps);
      if (const auto bad = first_non_finite(bg.report, bg.grads); !bad.empty()) {
        throw NumericalError("non-finite " + bad + " at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batch_no));
      }
      clip_gradients(bg.grads, config.clip);
      adadelta_step(params, bg.grads, state);
      for (const auto& [name, p] : params) {
        if (!p.all_finite()) {
          throw NumericalError("non-finite parameter '" + name + "' after update at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batch_no));
        }
      }
      append(epoch_report, bg.report);
    }
    assign_parameters(model, params);

    EpochLog row;
    row.epoch = epoch;
    row.train_bound = per_step(epoch_report.bound_total, epoch_report.steps);
    row.kl_term = per_step(epoch_report.kl_total, epoch_report.steps);
    row.recon_term = per_step(epoch_report.recon_total, epoch_report.steps);
    if (validation.empty()) {
      row.val_bound = row.train_bound;
    } else {
      const BoundReport vr = evaluate_bound(model, validation, eval_seed);
      row.val_bound = per_step(vr.bound_total, vr.steps);
    }
    if (!std::isfinite(row.val_bound)) {
      throw NumericalError("non-finite validation bound at epoch " + std::to_string(epoch));
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    res.log.push_back(row);
    if (on_epoch) on_epoch(row);

    if (row.val_bound < res.best_val) {
      res.best_val = row.val_bound;
      res.best = model;
      res.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience && config.patience > 0) {
      res.early_stopped = true;
      break;
    }
  }
  if (res.log.empty()) res.best_val = 0.0;
  return res;
}

void write_training_log(std::ostream& out, const std::vector<EpochLog>& log) {
  out << "epoch,train_bound,val_bound,kl_term,recon_term\n";
  for (const auto& r : log) {
    out << r.epoch << ',' << format_double(r.train_bound) << ',' << format_double(r.val_bound) << ','
        << format_double(r.kl_term) << ',' << format_double(r.recon_term) << '\n';
  }
}

void write_timing_log(std::ostream& out, const std::vector<EpochLog>& log) {
  out << "epoch,seconds\n";
  for (const auto& r : log) out << r.epoch << ',' << format_double(r.seconds) << '\n';
}

}  // namespace storn
