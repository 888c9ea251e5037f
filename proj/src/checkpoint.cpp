#include "storn/checkpoint.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "storn/errors.hpp"
#include "storn/params_io.hpp"

namespace storn {

using nlohmann::json;

namespace {

json spec_to_json(const ModelSpec& s) {
  return {{"kind", to_string(s.kind)},
          {"input", s.input},
          {"hidden", s.hidden},
          {"recog_hidden", s.recog_hidden},
          {"latent", s.latent},
          {"gen_transfer", to_string(s.gen_transfer)},
          {"recog_transfer", to_string(s.recog_transfer)},
          {"likelihood", to_string(s.likelihood)},
          {"sigma_out", s.sigma_out},
          {"recognition", to_string(s.recognition)},
          {"sigma_floor", s.sigma_floor},
          {"prob_clamp", s.prob_clamp}};
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("checkpoint header lacks '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint header field '") + key + "': " + e.what());
  }
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec s;
  try {
    s.kind = parse_model_kind(field<std::string>(j, "kind"));
    s.gen_transfer = parse_transfer(field<std::string>(j, "gen_transfer"));
    s.recog_transfer = parse_transfer(field<std::string>(j, "recog_transfer"));
    s.likelihood = parse_likelihood(field<std::string>(j, "likelihood"));
    s.recognition = parse_recognition_mode(field<std::string>(j, "recognition"));
  } catch (const ConfigError& e) {
    throw ParseError(std::string("checkpoint header: ") + e.what());
  }
  s.input = field<std::size_t>(j, "input");
  s.hidden = field<std::size_t>(j, "hidden");
  s.recog_hidden = field<std::size_t>(j, "recog_hidden");
  s.latent = field<std::size_t>(j, "latent");
  s.sigma_out = field<double>(j, "sigma_out");
  s.sigma_floor = field<double>(j, "sigma_floor");
  s.prob_clamp = field<double>(j, "prob_clamp");
  return s;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  validate(ck.model);
  json header{{"spec", spec_to_json(ck.model.spec)},
              {"feature_kind", ck.kind == FeatureKind::binary ? "binary" : "real"},
              {"channel_names", ck.channel_names},
              {"standardization", nullptr}};
  if (ck.standardization) {
    header["standardization"] = {{"mean", ck.standardization->mean}, {"std", ck.standardization->std}};
  }
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  io::write_u32(out, kCheckpointVersion);
  io::write_string(out, header.dump());
  write_params(out, parameters_of(ck.model));
  if (!out) throw ParseError("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[sizeof(kCheckpointMagic)];
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(magic, magic + sizeof(magic), kCheckpointMagic)) {
    throw ParseError("not a checkpoint (bad magic)");
  }
  const auto version = io::read_u32(in);
  if (version != kCheckpointVersion) throw ParseError("unsupported checkpoint version " + std::to_string(version));
  json header;
  try {
    header = json::parse(io::read_string(in));
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint header is not valid JSON: ") + e.what());
  }
  Checkpoint ck;
  const ModelSpec spec = spec_from_json(field<json>(header, "spec"));
  try {
    ck.model = make_model(spec, "zero", 0);
  } catch (const ConfigError& e) {
    throw ParseError(std::string("checkpoint header: ") + e.what());
  }
  assign_parameters(ck.model, read_params(in));
  validate(ck.model);
  const auto kind = field<std::string>(header, "feature_kind");
  if (kind != "binary" && kind != "real") throw ParseError("checkpoint feature kind '" + kind + "'");
  ck.kind = kind == "binary" ? FeatureKind::binary : FeatureKind::real;
  ck.channel_names = field<std::vector<std::string>>(header, "channel_names");
  const json& st = header.at("standardization");
  if (!st.is_null()) {
    ChannelStats stats{field<std::vector<double>>(st, "mean"), field<std::vector<double>>(st, "std")};
    if (stats.mean.size() != spec.input || stats.std.size() != spec.input) {
      throw ParseError("checkpoint standardisation statistics do not match the input width");
    }
    ck.standardization = std::move(stats);
  }
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
  write_checkpoint(out, ck);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint '" + path.string() + "'");
  return read_checkpoint(in);
}

}  // namespace storn
