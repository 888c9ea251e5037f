#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "storn/sequence.hpp"
#include "storn/tensor.hpp"

namespace storn {

inline constexpr std::size_t kDefaultChannels = 88;
inline constexpr double kStdFloor = 1e-8;

enum class FeatureKind { binary, real };

/// Per-channel standardisation statistics.
struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> std;
};

/// Analytic reference values attached by the synthetic generators.
struct Oracle {
  std::optional<double> step_nll;             // true NLL per time step
  std::optional<double> factorized_step_nll;  // best history-free factorised model
  std::vector<double> sequence_nll;           // exact marginal NLL per sequence
};

struct Dataset {
  FeatureKind kind = FeatureKind::real;
  std::size_t channels = 0;
  std::vector<Tensor> sequences;            // each length x channels
  std::vector<std::string> ids;             // one per sequence
  std::vector<std::string> channel_names;   // real data only
  std::optional<ChannelStats> standardization;
  Oracle oracle;

  std::size_t size() const { return sequences.size(); }
  bool empty() const { return sequences.empty(); }
  std::size_t total_steps() const;
  /// Throws ValidationError when an invariant fails.
  void validate() const;
  /// Sub-dataset with the given sequences, in the given order.
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

// Event format: UTF-8, one sequence per line, steps separated by ';',
// events within a step by ',', an empty step is an empty field. Blank lines
// are skipped.
Dataset parse_event_sequences(std::istream& in, std::size_t channels = kDefaultChannels,
                              const std::string& source = "<stream>");
Dataset load_event_sequences(const std::filesystem::path& path, std::size_t channels = kDefaultChannels);
/// Binary vectors back to event lists; entries >= 0.5 count as events.
void write_event_sequences(std::ostream& out, const Dataset& ds);
void save_event_sequences(const std::filesystem::path& path, const Dataset& ds);

/// Event lists of one binary step vector.
std::vector<std::size_t> events_of(std::span<const double> step);

// Real format: comma-separated table, header row of column names containing
// `seq_id`, every other column a channel. Rows are grouped by seq_id in
// order of first appearance.
Dataset parse_real_sequences(std::istream& in, const std::string& source = "<stream>");
Dataset load_real_sequences(const std::filesystem::path& path);
void write_real_sequences(std::ostream& out, const Dataset& ds);
void save_real_sequences(const std::filesystem::path& path, const Dataset& ds);

/// Shortest round-trip decimal form.
std::string format_double(double v);

ChannelStats fit_standardization(const Dataset& ds);
Dataset standardize(const Dataset& ds, const ChannelStats& stats);
Dataset destandardize(const Dataset& ds, const ChannelStats& stats);
Tensor destandardize(const Tensor& seq, const ChannelStats& stats);

struct Batch {
  SequenceBatch data;
  std::vector<std::size_t> indices;  // dataset positions, in batch order
};

/// Seeded shuffle, then consecutive groups of `batch_size` padded to their
/// longest member.
std::vector<Batch> make_batches(const Dataset& ds, std::size_t batch_size, std::uint64_t seed);
/// Same grouping without shuffling.
std::vector<Batch> ordered_batches(const Dataset& ds, std::size_t batch_size);
SequenceBatch to_batch(const Dataset& ds, const std::vector<std::size_t>& indices);
SequenceBatch to_batch(const Dataset& ds);

struct Split {
  Dataset train;
  Dataset validation;
  Dataset test;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Seeded 80/10/10 partition of n sequences (validation and test get n / 10
/// each), indices sorted within each part.
SplitIndices split_indices(std::size_t n, std::uint64_t seed);
Split apply_split(const Dataset& ds, const SplitIndices& idx);
Split split_dataset(const Dataset& ds, std::uint64_t seed);
/// Manifest lines "<sequence index> <train|validation|test>", '#' comments.
/// Every sequence must be assigned exactly once.
SplitIndices read_split_manifest(std::size_t n, std::istream& manifest, const std::string& source);
SplitIndices read_split_manifest(std::size_t n, const std::filesystem::path& manifest);
void write_split_manifest(std::ostream& out, const SplitIndices& idx);
Split split_from_manifest(const Dataset& ds, const std::filesystem::path& manifest);
Split split_from_manifest(const Dataset& ds, std::istream& manifest, const std::string& source);

// Synthetic generators.

/// Every step independently all ones with probability 0.5, else all zeros.
Dataset synth_coupled_binary(std::size_t n, std::size_t steps, std::size_t channels, std::uint64_t seed);

/// Scalar STORN with identity transfers and gaussian likelihood:
///   h_t = w_in x_{t-1} + w_rec h_{t-1} + w_lat z_t + b_hid,  z_t ~ N(0, 1)
///   x_t = w_out h_t + b_out + sigma_out e_t,                 e_t ~ N(0, 1)
/// with x_0 = h_0 = 0.
struct LinearGaussianParams {
  double w_in = 0.0;
  double w_rec = 0.0;
  double w_out = 1.0;
  double b_hid = 0.0;
  double b_out = 0.0;
  double w_lat = 1.0;
  double sigma_out = 1.0;
};

inline constexpr std::size_t kLinearGaussianMaxSteps = 6;

Dataset synth_linear_gaussian(std::size_t n, std::size_t steps, std::uint64_t seed,
                              const LinearGaussianParams& p);

/// Mean and covariance of x_{1:T}, assembled from the linear recursions.
struct GaussianMarginal {
  std::vector<double> mean;
  std::vector<std::vector<double>> cov;
};
GaussianMarginal linear_gaussian_marginal(const LinearGaussianParams& p, std::size_t steps);
double linear_gaussian_nll(const LinearGaussianParams& p, std::span<const double> x);
/// Differential entropy of the marginal, nats.
double linear_gaussian_entropy(const LinearGaussianParams& p, std::size_t steps);

/// Noisy sinusoids: channel k of sequence i is
/// a_k sin(f_k t + phase_ik) + noise * N(0, 1).
Dataset synth_sines(std::size_t n, std::size_t steps, std::size_t channels, double noise, std::uint64_t seed);

}  // namespace storn
