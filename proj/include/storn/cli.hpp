#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "storn/checkpoint.hpp"
#include "storn/optimizer.hpp"

namespace storn::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kNumerical = 3 };

enum class DataFormat { events, real };
DataFormat parse_data_format(std::string_view s);
std::string_view to_string(DataFormat f);

// Run configuration, a JSON object. Every key is optional; unknown keys are
// rejected. Relative paths resolve against the config file's directory.
//
//   seed          0            global seed, fanned out to named sub-seeds
//   output_dir    "run"
//   model.kind            "storn"   storn | srnn
//   model.hidden          32
//   model.recog_hidden    32
//   model.latent          8         ignored for srnn
//   model.gen_transfer    "tanh"    tanh | logistic | identity
//   model.recog_transfer  "tanh"
//   model.likelihood      "auto"    bernoulli | gaussian | auto (by data format)
//   model.sigma_out       1.0
//   model.recognition     "causal"  causal | lagged | bidirectional
//   model.init            "default" default | zero
//   train.batch_size      16
//   train.max_epochs      100
//   train.patience        20        0 disables early stopping
//   train.clip            10.0
//   train.rho             0.95
//   train.epsilon         1e-6
//   train.momentum        0.9
//   data.path             ""        required
//   data.format           "events"  events | real
//   data.channels         88        events only
//   data.standardize      true      real only, statistics from the training split
//   data.split_manifest   null      explicit split; seeded 80/10/10 otherwise
struct ModelConfig {
  ModelKind kind = ModelKind::storn;
  std::size_t hidden = 32;
  std::size_t recog_hidden = 32;
  std::size_t latent = 8;
  Transfer gen_transfer = Transfer::tanh;
  Transfer recog_transfer = Transfer::tanh;
  std::optional<Likelihood> likelihood;
  double sigma_out = 1.0;
  RecognitionMode recognition = RecognitionMode::causal;
  std::string init = "default";
};

struct DataConfig {
  std::filesystem::path path;
  DataFormat format = DataFormat::events;
  std::size_t channels = kDefaultChannels;
  bool standardize = true;
  std::optional<std::filesystem::path> split_manifest;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "run";
  ModelConfig model;
  TrainConfig train;
  DataConfig data;

  Likelihood likelihood() const;
  ModelSpec model_spec(std::size_t input) const;
};

/// Throws ConfigError naming the offending field.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
/// Fully resolved form: every field present, paths absolute.
nlohmann::json to_json(const RunConfig& c);

/// Loads a dataset in the given format, throwing ConfigError when the file
/// does not exist.
Dataset load_dataset(const std::filesystem::path& path, DataFormat format, std::size_t channels);
void save_dataset(const std::filesystem::path& path, const Dataset& ds);

/// "<name> <bytes> <fnv1a64 hex>" per file, sorted by name.
void write_manifest(const std::filesystem::path& dir, const std::vector<std::string>& files);

struct TrainOptions {
  std::filesystem::path config;
  bool quiet = false;
};

struct EvalOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path data;
  std::filesystem::path output;  // empty: stdout
  std::size_t samples = 100;
  std::size_t bound_samples = 10;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> split;  // manifest from train
  std::string part = "test";
};

struct SampleOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path prefix;
  std::filesystem::path output;
  long long horizon = 0;
  long long count = 1;
  std::optional<std::size_t> prefix_length;
  std::uint64_t seed = 0;
};

struct ImputeOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path data;
  std::filesystem::path output_dir;
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<std::size_t> channels;
  std::uint64_t seed = 0;
};

struct SynthOptions {
  std::string kind;  // coupled | linear-gaussian | sines
  std::filesystem::path output;
  std::size_t count = 500;
  std::size_t steps = 10;
  std::size_t channels = 4;
  double noise = 0.1;
  LinearGaussianParams linear;
  std::uint64_t seed = 0;
};

// Each command reports errors on `err` and returns an ExitCode.
int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sample(const SampleOptions& opt, std::ostream& out, std::ostream& err);
int cmd_impute(const ImputeOptions& opt, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err);

/// Full command line, argv[0] included.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace storn::cli
