#pragma once

#include <cstdint>
#include <vector>

#include "storn/sequence.hpp"
#include "storn/storn.hpp"

namespace storn {

inline constexpr std::size_t kDefaultImportanceSamples = 100;

struct NllEstimate {
  double value = 0.0;  // nats, -log of the mean importance weight
  std::size_t num_samples = 0;
  double log_weight_std = 0.0;
  double ess = 0.0;        // (sum w)^2 / sum w^2, in (0, S]
  double std_error = 0.0;  // delta-method standard error of `value`
};

struct ImportanceReport {
  std::vector<NllEstimate> per_sequence;
  std::vector<std::size_t> lengths;
  double total = 0.0;            // sum of per-sequence values
  double total_std_error = 0.0;  // per-sequence errors combined in quadrature
  std::size_t steps = 0;
};

struct ImportanceOptions {
  std::size_t samples = kDefaultImportanceSamples;
  std::uint64_t seed = 0;
  /// Global index of the batch's first sequence; noise stream of sample s of
  /// sequence i is stream_seed(seed, i * samples + s).
  std::size_t index_offset = 0;
  /// Replicated rows evaluated together.
  std::size_t chunk = 512;
};

/// Importance-sampled -log p(x) per sequence with the recognition network as
/// proposal. srnn models have no latents and get the exact NLL.
ImportanceReport importance_nll(const StornModel& m, const SequenceBatch& x, const ImportanceOptions& opt);

/// Summary of a set of log-weights: -(logsumexp - log S) and diagnostics.
NllEstimate summarize_log_weights(const std::vector<double>& log_w);

struct StdSearchResult {
  double sigma = 0.0;
  double nll = 0.0;  // total importance NLL over the data at `sigma`
  std::vector<std::pair<double, double>> probes;  // (sigma, nll) in probe order
};

/// Golden-section search on log sigma_out over [lo, hi] minimising the total
/// importance NLL with a fixed evaluation seed. iters = 0 evaluates the
/// log-midpoint only; otherwise lo and hi are probed as well and the best
/// probed point is returned.
StdSearchResult std_search(const StornModel& m, const SequenceBatch& x, double lo, double hi, int iters,
                           const ImportanceOptions& opt);

}  // namespace storn
