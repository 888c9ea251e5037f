#pragma once

#include <cstdint>
#include <vector>

#include "storn/sequence.hpp"
#include "storn/storn.hpp"

namespace storn {

/// Steps [start, end) of the listed channels (all channels when empty).
struct CorruptionSpec {
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<std::size_t> channels;
  std::uint64_t seed = 0;
};

/// Throws ArgumentError unless start <= end <= every sequence length and all
/// channels exist.
void check_window(const CorruptionSpec& spec, const SequenceBatch& x);

/// Replaces the window with standard normal noise. Sequence b draws from
/// stream_seed(seed, index_offset + b).
SequenceBatch corrupt(const SequenceBatch& x, const CorruptionSpec& spec, std::size_t index_offset = 0);

/// Single-pass MAP imputation: z = posterior mean from the recognition
/// network on the corrupted input, then a generating rollout in which window
/// entries become the likelihood argmax (gaussian mean, bernoulli
/// probability >= 0.5) and are fed forward. Entries outside the window are
/// copied bitwise.
SequenceBatch impute(const StornModel& m, const SequenceBatch& corrupted, const CorruptionSpec& spec);

/// Prefix-conditioned generation of `horizon` extra steps: z from the prior
/// (sequence b uses stream_seed(seed, b)), teacher forcing over the prefix,
/// then the model's own mean / probability vector as the next input. The
/// prefix is copied verbatim.
SequenceBatch generate(const StornModel& m, const SequenceBatch& prefix, std::size_t horizon, std::uint64_t seed);

/// Mean squared difference over entries valid in both masks; 0 when none.
double mse(const SequenceBatch& pred, const SequenceBatch& target);

/// Per-sequence mean squared difference inside the window.
std::vector<double> window_mse(const SequenceBatch& pred, const SequenceBatch& target, const CorruptionSpec& spec);

enum class OneStepMode { map_latent, prior_mean };

/// mse between x and the one-step-ahead means with z = posterior mean or 0.
double one_step_mse(const StornModel& m, const SequenceBatch& x, OneStepMode mode);

}  // namespace storn
