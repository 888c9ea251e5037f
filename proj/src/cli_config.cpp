#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "storn/cli.hpp"
#include "storn/errors.hpp"
#include "storn/seed.hpp"

namespace storn::cli {

using nlohmann::json;
namespace fs = std::filesystem;

DataFormat parse_data_format(std::string_view s) {
  if (s == "events") return DataFormat::events;
  if (s == "real") return DataFormat::real;
  throw ConfigError("unknown data format '" + std::string(s) + "' (expected events or real)");
}

std::string_view to_string(DataFormat f) { return f == DataFormat::events ? "events" : "real"; }

Likelihood RunConfig::likelihood() const {
  if (model.likelihood) return *model.likelihood;
  return data.format == DataFormat::events ? Likelihood::bernoulli : Likelihood::gaussian;
}

ModelSpec RunConfig::model_spec(std::size_t input) const {
  ModelSpec s;
  s.kind = model.kind;
  s.input = input;
  s.hidden = model.hidden;
  s.recog_hidden = model.recog_hidden;
  s.latent = model.kind == ModelKind::srnn ? 0 : model.latent;
  s.gen_transfer = model.gen_transfer;
  s.recog_transfer = model.recog_transfer;
  s.likelihood = likelihood();
  s.sigma_out = model.sigma_out;
  s.recognition = model.recognition;
  return s;
}

namespace {

// Field reader for one JSON object; every access is checked and the caller
// calls finish() to reject unknown keys.
class Section {
 public:
  Section(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ConfigError(where("") + "expected an object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  std::string where(const std::string& key) const {
    const std::string path = prefix_.empty() ? key : (key.empty() ? prefix_ : prefix_ + "." + key);
    return path.empty() ? "config: " : path + ": ";
  }

  std::uint64_t count(const char* key, std::uint64_t fallback, bool positive) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError(where(key) + "expected a non-negative integer");
    }
    const auto n = v.get<std::uint64_t>();
    if (positive && n == 0) throw ConfigError(where(key) + "must be positive");
    return n;
  }

  double real(const char* key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + "expected a number");
    return v.get<double>();
  }

  bool boolean(const char* key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + "expected true or false");
    return v.get<bool>();
  }

  std::optional<std::string> text(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + "expected a string");
    return v.get<std::string>();
  }

  template <class F>
  auto parsed(const char* key, F parse) -> std::optional<decltype(parse(std::string_view{}))> {
    const auto s = text(key);
    if (!s) return std::nullopt;
    try {
      return parse(*s);
    } catch (const ConfigError& e) {
      throw ConfigError(where(key) + e.what());
    }
  }

  std::optional<Section> child(const char* key) {
    if (!has(key)) return std::nullopt;
    return Section(j_.at(key), prefix_.empty() ? key : prefix_ + "." + key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(where(key) + "unknown key");
    }
  }

 private:
  const json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
};

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return fs::absolute(base / p).lexically_normal();
}

}  // namespace

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  RunConfig c;
  Section root(j, "");
  c.seed = root.count("seed", 0, false);
  if (auto s = root.text("output_dir")) c.output_dir = *s;
  c.output_dir = resolve(c.output_dir, base_dir);

  if (auto m = root.child("model")) {
    auto& mc = c.model;
    if (auto v = m->parsed("kind", parse_model_kind)) mc.kind = *v;
    mc.hidden = m->count("hidden", mc.hidden, true);
    mc.recog_hidden = m->count("recog_hidden", mc.recog_hidden, true);
    mc.latent = m->count("latent", mc.latent, true);
    if (auto v = m->parsed("gen_transfer", parse_transfer)) mc.gen_transfer = *v;
    if (auto v = m->parsed("recog_transfer", parse_transfer)) mc.recog_transfer = *v;
    if (auto s = m->text("likelihood")) {
      if (*s == "auto") {
        mc.likelihood.reset();
      } else {
        try {
          mc.likelihood = parse_likelihood(*s);
        } catch (const ConfigError& e) {
          throw ConfigError(m->where("likelihood") + e.what());
        }
      }
    }
    mc.sigma_out = m->real("sigma_out", mc.sigma_out);
    if (!(mc.sigma_out > 0.0)) throw ConfigError(m->where("sigma_out") + "must be positive");
    if (auto v = m->parsed("recognition", parse_recognition_mode)) mc.recognition = *v;
    if (auto s = m->text("init")) {
      if (*s != "default" && *s != "zero") throw ConfigError(m->where("init") + "expected default or zero");
      mc.init = *s;
    }
    m->finish();
  }

  if (auto t = root.child("train")) {
    auto& tc = c.train;
    tc.batch_size = t->count("batch_size", tc.batch_size, true);
    tc.max_epochs = t->count("max_epochs", tc.max_epochs, false);
    tc.patience = t->count("patience", tc.patience, false);
    tc.clip = t->real("clip", tc.clip);
    tc.optimizer.rho = t->real("rho", tc.optimizer.rho);
    tc.optimizer.epsilon = t->real("epsilon", tc.optimizer.epsilon);
    tc.optimizer.momentum = t->real("momentum", tc.optimizer.momentum);
    t->finish();
    try {
      tc.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("train: ") + e.what());
    }
  }
  c.train.seed = c.seed;

  if (auto d = root.child("data")) {
    auto& dc = c.data;
    if (auto s = d->text("path")) dc.path = *s;
    if (auto v = d->parsed("format", parse_data_format)) dc.format = *v;
    dc.channels = d->count("channels", dc.channels, true);
    dc.standardize = d->boolean("standardize", dc.standardize);
    if (auto s = d->text("split_manifest")) dc.split_manifest = resolve(*s, base_dir);
    d->finish();
  }
  root.finish();
  if (c.data.path.empty()) throw ConfigError("data.path: required");
  c.data.path = resolve(c.data.path, base_dir);

  c.model_spec(1).validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j, fs::absolute(path).parent_path());
}

json to_json(const RunConfig& c) {
  const auto abs = [](const fs::path& p) { return p.empty() ? std::string() : fs::absolute(p).lexically_normal().string(); };
  json model{{"kind", to_string(c.model.kind)},
             {"hidden", c.model.hidden},
             {"recog_hidden", c.model.recog_hidden},
             {"latent", c.model.latent},
             {"gen_transfer", to_string(c.model.gen_transfer)},
             {"recog_transfer", to_string(c.model.recog_transfer)},
             {"likelihood", to_string(c.likelihood())},
             {"sigma_out", c.model.sigma_out},
             {"recognition", to_string(c.model.recognition)},
             {"init", c.model.init}};
  json train{{"batch_size", c.train.batch_size},
             {"max_epochs", c.train.max_epochs},
             {"patience", c.train.patience},
             {"clip", c.train.clip},
             {"rho", c.train.optimizer.rho},
             {"epsilon", c.train.optimizer.epsilon},
             {"momentum", c.train.optimizer.momentum}};
  json data{{"path", abs(c.data.path)},
            {"format", to_string(c.data.format)},
            {"channels", c.data.channels},
            {"standardize", c.data.standardize},
            {"split_manifest", nullptr}};
  if (c.data.split_manifest) data["split_manifest"] = abs(*c.data.split_manifest);
  return {{"seed", c.seed}, {"output_dir", abs(c.output_dir)}, {"model", model}, {"train", train}, {"data", data}};
}

Dataset load_dataset(const fs::path& path, DataFormat format, std::size_t channels) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw ConfigError("data file '" + path.string() + "' does not exist");
  return format == DataFormat::events ? load_event_sequences(path, channels) : load_real_sequences(path);
}

void save_dataset(const fs::path& path, const Dataset& ds) {
  if (ds.kind == FeatureKind::binary) {
    save_event_sequences(path, ds);
  } else {
    save_real_sequences(path, ds);
  }
}

void write_manifest(const fs::path& dir, const std::vector<std::string>& files) {
  std::vector<std::string> sorted = files;
  std::sort(sorted.begin(), sorted.end());
  std::ostringstream body;
  for (const auto& name : sorted) {
    std::ifstream in(dir / name, std::ios::binary);
    if (!in) throw ParseError("cannot read '" + (dir / name).string() + "' for the manifest");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    body << name << ' ' << bytes.size() << ' ' << std::hex << std::setw(16) << std::setfill('0')
         << fnv1a64(bytes) << std::dec << '\n';
  }
  const fs::path tmp = dir / "manifest.txt.tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << body.str();
    if (!out) throw ParseError("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, dir / "manifest.txt");
}

}  // namespace storn::cli
