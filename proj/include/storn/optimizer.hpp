#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "storn/data.hpp"
#include "storn/params_io.hpp"
#include "storn/storn.hpp"

namespace storn {

struct AdadeltaConfig {
  double rho = 0.95;
  double epsilon = 1e-6;
  double momentum = 0.9;
  void validate() const;
};

/// Decayed means E[g^2], E[dx^2] and the velocity, one slot per parameter.
struct AdadeltaSlot {
  Tensor sq_grad;
  Tensor sq_step;
  Tensor velocity;
};

struct AdadeltaState {
  AdadeltaConfig config;
  std::vector<AdadeltaSlot> slots;
};

AdadeltaState make_adadelta_state(const NamedTensors& params, const AdadeltaConfig& config);

/// One update, in place:
///   E[g^2] <- rho E[g^2] + (1 - rho) g^2
///   d      <- -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
///   E[dx^2] <- rho E[dx^2] + (1 - rho) d^2
///   v      <- m v + d
///   theta  <- theta + v
/// `grads` should be taken at lookahead(params, state).
void adadelta_step(NamedTensors& params, const NamedTensors& grads, AdadeltaState& state);

/// theta + m v, the point at which the next gradient is evaluated.
NamedTensors lookahead(const NamedTensors& params, const AdadeltaState& state);

/// Rescales all gradients by threshold / norm when the global L2 norm
/// exceeds `threshold`. Returns the norm before clipping.
double clip_gradients(NamedTensors& grads, double threshold);
double global_norm(const NamedTensors& grads);

struct TrainConfig {
  std::size_t batch_size = 16;
  std::size_t max_epochs = 100;
  std::size_t patience = 20;
  double clip = 10.0;
  AdadeltaConfig optimizer;
  std::uint64_t seed = 0;
  void validate() const;
};

/// Per-epoch record. Bounds and terms are per-timestep means in nats.
struct EpochLog {
  std::size_t epoch = 0;
  double train_bound = 0.0;
  double val_bound = 0.0;
  double kl_term = 0.0;
  double recon_term = 0.0;
  double seconds = 0.0;
};

struct FitResult {
  StornModel best;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;  // 0 when no epoch ran
  double best_val = 0.0;
  bool early_stopped = false;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Minibatch training of all parameters on the single-sample bound.
/// Selection and early stopping use the validation bound (training bound
/// when the validation set is empty) under fixed evaluation noise.
FitResult fit(const StornModel& init, const Dataset& train, const Dataset& validation, const TrainConfig& config,
              const EpochCallback& on_epoch = {});

/// Per-timestep mean bound of a dataset with evaluation noise stream
/// stream_seed(seed, sequence index).
BoundReport evaluate_bound(const StornModel& m, const Dataset& ds, std::uint64_t seed, std::size_t batch_size = 64);

/// Noise for a batch: sequence i of the batch draws from stream
/// stream_seed(seed, indices[i]).
Tensor batch_noise(std::size_t steps, std::size_t latent, const std::vector<std::size_t>& indices, std::uint64_t seed);

/// epoch,train_bound,val_bound,kl_term,recon_term with round-trip doubles.
void write_training_log(std::ostream& out, const std::vector<EpochLog>& log);
/// epoch,seconds
void write_timing_log(std::ostream& out, const std::vector<EpochLog>& log);

}  // namespace storn
