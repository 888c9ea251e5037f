#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "storn/cli.hpp"
#include "storn/errors.hpp"
#include "storn/seed.hpp"

using namespace storn;
using namespace storn::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run storn_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "storn");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("storn_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  REQUIRE(it != header.end());
  return static_cast<std::size_t>(it - header.begin());
}

// coupled data plus a tiny config in `dir`
fs::path coupled_run(const fs::path& dir, const json& overrides = json::object()) {
  REQUIRE(storn_cli({"synth", "coupled", "-o", (dir / "data.txt").string(), "-n", "60", "--steps", "6",
                     "--channels", "3", "--seed", "2"})
              .code == 0);
  json cfg{{"seed", 5},
           {"output_dir", "out"},
           {"model", {{"hidden", 6}, {"recog_hidden", 5}, {"latent", 2}}},
           {"train", {{"max_epochs", 3}, {"batch_size", 8}}},
           {"data", {{"path", "data.txt"}, {"channels", 3}}}};
  cfg.merge_patch(overrides);
  write(dir / "config.json", cfg.dump());
  return dir / "config.json";
}

}  // namespace

TEST_CASE("run config defaults and resolution") {
  const RunConfig c = parse_run_config(json{{"data", {{"path", "d/x.txt"}}}}, "/base");
  CHECK(c.seed == 0);
  CHECK(c.model.kind == ModelKind::storn);
  CHECK(c.model.hidden == 32);
  CHECK(c.model.recognition == RecognitionMode::causal);
  CHECK(c.train.batch_size == 16);
  CHECK(c.train.max_epochs == 100);
  CHECK(c.train.optimizer.rho == 0.95);
  CHECK(c.data.channels == 88);
  CHECK(c.data.path == fs::path("/base/d/x.txt"));
  CHECK(c.output_dir == fs::path("/base/run"));
  CHECK(c.likelihood() == Likelihood::bernoulli);

  const RunConfig r = parse_run_config(json{{"data", {{"path", "/abs/x.csv"}, {"format", "real"}}}, {"seed", 9}});
  CHECK(r.likelihood() == Likelihood::gaussian);
  CHECK(r.train.seed == 9);
  CHECK(r.data.path == fs::path("/abs/x.csv"));
}

TEST_CASE("run config rejects unknown keys and bad values by field") {
  const auto msg = [](const json& j) {
    try {
      parse_run_config(j);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("accepted");
  };
  const json data{{"path", "x"}};
  CHECK(msg(json{{"data", data}, {"sed", 1}}).find("sed: unknown key") != std::string::npos);
  CHECK(msg(json{{"data", data}, {"model", {{"hiden", 3}}}}).find("model.hiden: unknown key") != std::string::npos);
  CHECK(msg(json{{"data", data}, {"train", {{"lr", 1}}}}).find("train.lr") != std::string::npos);
  CHECK(msg(json{{"data", {{"path", "x"}, {"chanels", 3}}}}).find("data.chanels") != std::string::npos);
  CHECK(msg(json{{"data", data}, {"model", {{"hidden", -3}}}}).find("model.hidden") != std::string::npos);
  CHECK(msg(json{{"data", data}, {"model", {{"hidden", 0}}}}).find("model.hidden") != std::string::npos);
  CHECK(msg(json{{"data", data}, {"model", {{"hidden", 2.5}}}}).find("model.hidden") != std::string::npos);
  CHECK(msg(json{{"data", data}, {"model", {{"recognition", "future"}}}}).find("model.recognition") !=
        std::string::npos);
  CHECK(msg(json{{"data", data}, {"model", {{"likelihood", "poisson"}}}}).find("model.likelihood") !=
        std::string::npos);
  CHECK(msg(json{{"data", data}, {"model", {{"init", "xavier"}}}}).find("model.init") != std::string::npos);
  CHECK(msg(json{{"data", data}, {"train", {{"rho", 1.5}}}}).find("train") != std::string::npos);
  CHECK(msg(json{{"data", {{"path", "x"}, {"format", "midi"}}}}).find("data.format") != std::string::npos);
  CHECK(msg(json{{"data", {{"path", "x"}, {"standardize", "yes"}}}}).find("data.standardize") != std::string::npos);
  CHECK(msg(json::object()).find("data.path") != std::string::npos);
  CHECK(msg(json::array()).find("expected an object") != std::string::npos);
}

TEST_CASE("config snapshot round-trips") {
  const RunConfig c = parse_run_config(json{{"seed", 77},
                                            {"model",
                                             {{"kind", "srnn"},
                                              {"hidden", 7},
                                              {"recognition", "bidirectional"},
                                              {"gen_transfer", "logistic"},
                                              {"sigma_out", 0.3}}},
                                            {"train", {{"patience", 0}, {"clip", 2.5}}},
                                            {"data", {{"path", "a.csv"}, {"format", "real"}, {"split_manifest", "m.txt"}}}},
                                       "/base");
  const json snap = to_json(c);
  const RunConfig back = parse_run_config(snap);
  CHECK(to_json(back) == snap);
  CHECK(back.model.kind == ModelKind::srnn);
  CHECK(back.model.sigma_out == 0.3);
  CHECK(back.train.patience == 0);
  CHECK(*back.data.split_manifest == fs::path("/base/m.txt"));
  CHECK(back.likelihood() == Likelihood::gaussian);
}

TEST_CASE("train writes its outputs and a manifest last") {
  const fs::path dir = scratch("train");
  const auto cfg = coupled_run(dir);
  const Run r = storn_cli({"train", cfg.string(), "--quiet"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  for (const char* f : {"checkpoint.bin", "log.csv", "timing.csv", "config.json", "split.txt", "manifest.txt"}) {
    CHECK(fs::exists(dir / "out" / f));
  }
  const auto log = read_csv(dir / "out" / "log.csv");
  CHECK(log.size() == 4);
  CHECK(log[0] == std::vector<std::string>{"epoch", "train_bound", "val_bound", "kl_term", "recon_term"});

  std::istringstream manifest(slurp(dir / "out" / "manifest.txt"));
  std::string name, hash;
  std::size_t bytes = 0, listed = 0;
  while (manifest >> name >> bytes >> hash) {
    const std::string body = slurp(dir / "out" / name);
    CHECK(body.size() == bytes);
    std::ostringstream h;
    h << std::hex;
    h.width(16);
    h.fill('0');
    h << fnv1a64(body);
    CHECK(h.str() == hash);
    ++listed;
  }
  CHECK(listed == 5);
}

TEST_CASE("train is deterministic and its snapshot reproduces the run") {
  const fs::path dir = scratch("determinism");
  const auto cfg = coupled_run(dir);
  REQUIRE(storn_cli({"train", cfg.string(), "-q"}).code == 0);
  const std::string log = slurp(dir / "out" / "log.csv"), ck = slurp(dir / "out" / "checkpoint.bin");
  REQUIRE(storn_cli({"train", cfg.string(), "-q"}).code == 0);
  CHECK(slurp(dir / "out" / "log.csv") == log);
  CHECK(slurp(dir / "out" / "checkpoint.bin") == ck);

  fs::copy_file(dir / "out" / "config.json", dir / "snapshot.json");
  REQUIRE(storn_cli({"train", (dir / "snapshot.json").string(), "-q"}).code == 0);
  CHECK(slurp(dir / "out" / "log.csv") == log);
  CHECK(slurp(dir / "out" / "checkpoint.bin") == ck);
}

TEST_CASE("train with zero epochs writes the initial model") {
  const fs::path dir = scratch("zero_epochs");
  const auto cfg = coupled_run(dir, {{"train", {{"max_epochs", 0}}}});
  REQUIRE(storn_cli({"train", cfg.string(), "-q"}).code == 0);
  const Checkpoint ck = load_checkpoint(dir / "out" / "checkpoint.bin");
  const RunConfig c = load_run_config(cfg);
  const StornModel init = make_model(c.model_spec(3), "default", derive_seed(5, "init"));
  const auto a = parameters_of(ck.model), b = parameters_of(init);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].second == b[i].second);
  CHECK(read_csv(dir / "out" / "log.csv").size() == 1);
}

TEST_CASE("train exit codes") {
  const fs::path dir = scratch("train_errors");
  write(dir / "missing.json", json{{"data", {{"path", "nowhere.txt"}}}}.dump());
  const Run missing = storn_cli({"train", (dir / "missing.json").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("nowhere.txt") != std::string::npos);

  write(dir / "typo.json", R"({"data": {"path": "x"}, "train": {"max_epoch": 3}})");
  const Run typo = storn_cli({"train", (dir / "typo.json").string()});
  CHECK(typo.code == 2);
  CHECK(typo.err.find("train.max_epoch") != std::string::npos);

  write(dir / "broken.json", "{ not json");
  CHECK(storn_cli({"train", (dir / "broken.json").string()}).code == 2);

  // values whose squares overflow make the bound non-finite
  write(dir / "huge.csv", "seq_id,a\ns,1e300\ns,-1e300\ns,1e300\n");
  write(dir / "huge.json", json{{"model", {{"hidden", 2}, {"recog_hidden", 2}, {"latent", 1}}},
                                {"train", {{"max_epochs", 2}}},
                                {"data", {{"path", "huge.csv"}, {"format", "real"}, {"standardize", false}}}}
                               .dump());
  const Run nan = storn_cli({"train", (dir / "huge.json").string(), "-q"});
  CHECK(nan.code == 3);
  CHECK(nan.err.find("non-finite") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "run" / "manifest.txt"));
}

TEST_CASE("eval") {
  const fs::path dir = scratch("eval");
  const auto cfg = coupled_run(dir);
  REQUIRE(storn_cli({"train", cfg.string(), "-q"}).code == 0);
  const std::string ck = (dir / "out" / "checkpoint.bin").string(), data = (dir / "data.txt").string();

  const Run r = storn_cli({"eval", "--checkpoint", ck, "--data", data, "-S", "200", "-o", (dir / "eval.csv").string(),
                           "--split", (dir / "out" / "split.txt").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rows = read_csv(dir / "eval.csv");
  REQUIRE(rows.size() == 6 + 1 + 1);  // header, 6 test sequences, aggregate
  const auto& h = rows[0];
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == h.size());
    for (const char* col : {"bound", "nll", "bound_per_step", "nll_per_step", "kl", "recon"}) {
      CHECK(std::isfinite(std::stod(rows[i][column(h, col)])));
    }
  }
  const auto& all = rows.back();
  CHECK(all[0] == "ALL");
  const double bound = std::stod(all[column(h, "bound")]), nll = std::stod(all[column(h, "nll")]);
  const double se = std::hypot(std::stod(all[column(h, "bound_std_error")]), std::stod(all[column(h, "nll_std_error")]));
  CHECK(bound >= nll - 3.0 * se);
  CHECK(std::stod(all[column(h, "steps")]) == 36.0);

  // S = 1: both columns present and finite
  const Run one = storn_cli({"eval", "--checkpoint", ck, "--data", data, "-S", "1", "--bound-samples", "1"});
  REQUIRE(one.code == 0);
  CHECK(one.out.find("ALL,") != std::string::npos);

  // deterministic under a fixed seed
  CHECK(storn_cli({"eval", "--checkpoint", ck, "--data", data, "-S", "7", "--seed", "3"}).out ==
        storn_cli({"eval", "--checkpoint", ck, "--data", data, "-S", "7", "--seed", "3"}).out);

  write(dir / "wide.txt", "0,1,2,3,4\n");
  const Run wide = storn_cli({"eval", "--checkpoint", ck, "--data", (dir / "wide.txt").string()});
  CHECK(wide.code == 2);

  write(dir / "empty.txt", "\n\n");
  CHECK(storn_cli({"eval", "--checkpoint", ck, "--data", (dir / "empty.txt").string()}).code == 2);
  CHECK(storn_cli({"eval", "--checkpoint", ck, "--data", (dir / "none.txt").string()}).code == 2);
  CHECK(storn_cli({"eval", "--checkpoint", data, "--data", data}).code == 2);
}

TEST_CASE("eval: a model with zero latent weights reduces to the recurrent network") {
  const fs::path dir = scratch("reduction");
  const auto cfg = coupled_run(dir, {{"train", {{"max_epochs", 1}}}});
  REQUIRE(storn_cli({"train", cfg.string(), "-q"}).code == 0);
  Checkpoint ck = load_checkpoint(dir / "out" / "checkpoint.bin");
  ck.model.w_latent = Tensor(ck.model.w_latent.shape());
  save_checkpoint(dir / "storn.bin", ck);
  Checkpoint plain = ck;
  plain.model.spec.kind = ModelKind::srnn;
  plain.model.spec.latent = 0;
  plain.model.w_latent = Tensor();
  plain.model.recog = {};
  save_checkpoint(dir / "srnn.bin", plain);

  const std::string data = (dir / "data.txt").string();
  std::vector<std::vector<std::string>> a, b;
  for (const char* seed : {"1", "2"}) {
    REQUIRE(storn_cli({"eval", "--checkpoint", (dir / "storn.bin").string(), "--data", data, "--bound-samples", "1",
                       "-S", "5", "--seed", seed, "-o", (dir / "a.csv").string()})
                .code == 0);
    REQUIRE(storn_cli({"eval", "--checkpoint", (dir / "srnn.bin").string(), "--data", data, "--bound-samples", "1",
                       "-S", "5", "--seed", seed, "-o", (dir / "b.csv").string()})
                .code == 0);
    const auto ra = read_csv(dir / "a.csv"), rb = read_csv(dir / "b.csv");
    if (a.empty()) a = ra;
    REQUIRE(ra.size() == rb.size());
    const std::size_t recon = column(ra[0], "recon"), nll = column(rb[0], "nll");
    for (std::size_t i = 1; i < ra.size(); ++i) {
      CHECK(ra[i][recon] == a[i][recon]);   // independent of the noise seed
      CHECK(ra[i][recon] == rb[i][recon]);  // equal to the plain network's NLL
      CHECK(ra[i][recon] == rb[i][nll]);
    }
  }
}

TEST_CASE("sample") {
  const fs::path dir = scratch("sample");
  REQUIRE(storn_cli({"synth", "sines", "-o", (dir / "sines.csv").string(), "-n", "20", "--steps", "24", "--channels",
                     "2", "--seed", "4"})
              .code == 0);
  write(dir / "config.json", json{{"output_dir", "out"},
                                  {"model", {{"hidden", 6}, {"recog_hidden", 4}, {"latent", 2}}},
                                  {"train", {{"max_epochs", 1}}},
                                  {"data", {{"path", "sines.csv"}, {"format", "real"}}}}
                                 .dump());
  REQUIRE(storn_cli({"train", (dir / "config.json").string(), "-q"}).code == 0);
  const std::string ck = (dir / "out" / "checkpoint.bin").string(), prefix = (dir / "sines.csv").string();
  const auto sample = [&](const std::string& count, const std::string& seed, const std::string& out) {
    return storn_cli({"sample", "--checkpoint", ck, "--prefix", prefix, "--horizon", "80", "--count", count,
                      "--prefix-length", "20", "--seed", seed, "-o", (dir / out).string()});
  };
  REQUIRE(sample("50", "1", "a.csv").code == 0);
  const Dataset a = load_real_sequences(dir / "a.csv");
  const Dataset src = load_real_sequences(dir / "sines.csv");
  REQUIRE(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a.sequences[i].shape()[0] == 100);
    const Tensor& p = src.sequences[i % src.size()];
    for (std::size_t t = 0; t < 20; ++t)
      for (std::size_t k = 0; k < 2; ++k) CHECK(a.sequences[i].at(t, k) == p.at(t, k));
  }
  CHECK(a.channel_names == src.channel_names);

  REQUIRE(sample("50", "1", "b.csv").code == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  REQUIRE(sample("50", "2", "c.csv").code == 0);
  CHECK(slurp(dir / "a.csv") != slurp(dir / "c.csv"));

  REQUIRE(sample("0", "1", "empty.csv").code == 0);
  CHECK(fs::file_size(dir / "empty.csv") == 0);

  CHECK(storn_cli({"sample", "--checkpoint", ck, "--prefix", prefix, "--horizon", "-1", "-o",
                   (dir / "x.csv").string()})
            .code == 2);
  CHECK(storn_cli({"sample", "--checkpoint", ck, "--prefix", prefix, "--horizon", "3", "--prefix-length", "99", "-o",
                   (dir / "x.csv").string()})
            .code == 2);
}

TEST_CASE("eval reports one-step prediction error for real-valued models") {
  const fs::path dir = scratch("eval_real");
  REQUIRE(storn_cli({"synth", "sines", "-o", (dir / "sines.csv").string(), "-n", "10", "--steps", "16", "--channels",
                     "2", "--seed", "6"})
              .code == 0);
  write(dir / "config.json", json{{"output_dir", "out"},
                                  {"model", {{"hidden", 6}, {"recog_hidden", 4}, {"latent", 2}}},
                                  {"train", {{"max_epochs", 2}}},
                                  {"data", {{"path", "sines.csv"}, {"format", "real"}}}}
                                 .dump());
  REQUIRE(storn_cli({"train", (dir / "config.json").string(), "-q"}).code == 0);
  Checkpoint ck = load_checkpoint(dir / "out" / "checkpoint.bin");
  const std::string data = (dir / "sines.csv").string();
  const auto eval = [&](const fs::path& checkpoint, const std::string& out) {
    REQUIRE(storn_cli({"eval", "--checkpoint", checkpoint.string(), "--data", data, "-S", "3", "-o",
                       (dir / out).string()})
                .code == 0);
    return read_csv(dir / out);
  };

  const auto rows = eval(dir / "out" / "checkpoint.bin", "a.csv");
  REQUIRE(rows.size() == 12);
  const std::size_t map = column(rows[0], "mse_map"), prior = column(rows[0], "mse_prior");
  double mean_map = 0.0;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    CHECK(std::stod(rows[i][map]) >= 0.0);
    CHECK(std::isfinite(std::stod(rows[i][prior])));
    mean_map += std::stod(rows[i][map]) / 10.0;
  }
  // equal lengths: the aggregate is the plain mean
  CHECK(std::stod(rows.back()[map]) == doctest::Approx(mean_map).epsilon(1e-12));

  // without latent weights both settings of z give the same prediction
  ck.model.w_latent = Tensor(ck.model.w_latent.shape());
  save_checkpoint(dir / "flat.bin", ck);
  for (const auto& row : eval(dir / "flat.bin", "b.csv")) {
    if (row[0] != "seq_id") CHECK(row[map] == row[prior]);
  }

  // event models keep the original schema
  const auto cfg = coupled_run(dir / "events", {{"train", {{"max_epochs", 0}}}});
  REQUIRE(storn_cli({"train", cfg.string(), "-q"}).code == 0);
  const Run ev = storn_cli({"eval", "--checkpoint", (dir / "events" / "out" / "checkpoint.bin").string(), "--data",
                            (dir / "events" / "data.txt").string(), "-S", "2"});
  REQUIRE(ev.code == 0);
  CHECK(ev.out.find("mse_map") == std::string::npos);
}

TEST_CASE("sample from an event-data model writes events and keeps the prefix") {
  const fs::path dir = scratch("sample_events");
  const auto cfg = coupled_run(dir, {{"train", {{"max_epochs", 1}}}});
  REQUIRE(storn_cli({"train", cfg.string(), "-q"}).code == 0);
  REQUIRE(storn_cli({"sample", "--checkpoint", (dir / "out" / "checkpoint.bin").string(), "--prefix",
                     (dir / "data.txt").string(), "--horizon", "4", "--count", "5", "-o", (dir / "s.txt").string()})
              .code == 0);
  const Dataset s = load_event_sequences(dir / "s.txt", 3), d = load_event_sequences(dir / "data.txt", 3);
  REQUIRE(s.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    REQUIRE(s.sequences[i].shape()[0] == 10);
    for (std::size_t t = 0; t < 6; ++t)
      for (std::size_t k = 0; k < 3; ++k) CHECK(s.sequences[i].at(t, k) == d.sequences[i].at(t, k));
  }
}

TEST_CASE("impute") {
  const fs::path dir = scratch("impute");
  REQUIRE(storn_cli({"synth", "sines", "-o", (dir / "sines.csv").string(), "-n", "12", "--steps", "60", "--channels",
                     "2", "--seed", "8"})
              .code == 0);
  write(dir / "config.json", json{{"output_dir", "out"},
                                  {"model", {{"hidden", 6}, {"recog_hidden", 4}, {"latent", 2},
                                             {"recognition", "bidirectional"}}},
                                  {"train", {{"max_epochs", 1}}},
                                  {"data", {{"path", "sines.csv"}, {"format", "real"}}}}
                                 .dump());
  REQUIRE(storn_cli({"train", (dir / "config.json").string(), "-q"}).code == 0);
  const std::string ck = (dir / "out" / "checkpoint.bin").string(), data = (dir / "sines.csv").string();
  const auto impute = [&](const std::string& start, const std::string& end, const std::string& out) {
    return storn_cli({"impute", "--checkpoint", ck, "--data", data, "--start", start, "--end", end, "--seed", "3",
                      "-o", (dir / out).string()});
  };
  REQUIRE(impute("30", "40", "w").code == 0);
  for (const char* f : {"corrupted.csv", "imputed.csv", "mse.csv", "manifest.txt"}) CHECK(fs::exists(dir / "w" / f));
  const auto rows = read_csv(dir / "w" / "mse.csv");
  REQUIRE(rows.size() == 14);
  CHECK(rows[0] == std::vector<std::string>{"seq_id", "window_mse", "noise_mse"});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) > 0.0);

  const Dataset orig = load_real_sequences(dir / "sines.csv"), imp = load_real_sequences(dir / "w" / "imputed.csv");
  for (std::size_t i = 0; i < orig.size(); ++i)
    for (std::size_t t = 0; t < 60; ++t)
      if (t < 30 || t >= 40)
        for (std::size_t k = 0; k < 2; ++k) CHECK(imp.sequences[i].at(t, k) == orig.sequences[i].at(t, k));

  REQUIRE(impute("30", "40", "w2").code == 0);
  CHECK(slurp(dir / "w" / "imputed.csv") == slurp(dir / "w2" / "imputed.csv"));
  CHECK(slurp(dir / "w" / "mse.csv") == slurp(dir / "w2" / "mse.csv"));

  REQUIRE(impute("30", "30", "zero").code == 0);
  const auto z = read_csv(dir / "zero" / "mse.csv");
  for (std::size_t i = 1; i < z.size(); ++i) CHECK(std::stod(z[i][1]) == 0.0);
  CHECK(slurp(dir / "zero" / "imputed.csv") == slurp(dir / "zero" / "corrupted.csv"));

  CHECK(impute("50", "70", "bad").code == 2);
  CHECK(impute("40", "30", "bad").code == 2);
}

TEST_CASE("synth and argument handling") {
  const fs::path dir = scratch("synth");
  const Run lg = storn_cli({"synth", "linear-gaussian", "-o", (dir / "lg.csv").string(), "-n", "5", "--steps", "3",
                            "--w-rec", "0.5", "--sigma-out", "0.4"});
  REQUIRE_MESSAGE(lg.code == 0, lg.err);
  CHECK(fs::exists(dir / "lg.oracle.csv"));
  CHECK(read_csv(dir / "lg.oracle.csv").size() == 6);
  CHECK(load_real_sequences(dir / "lg.csv").size() == 5);

  CHECK(storn_cli({"synth", "brownian", "-o", (dir / "x.csv").string()}).code == 2);
  CHECK(storn_cli({"synth", "linear-gaussian", "-o", (dir / "x.csv").string(), "--steps", "40"}).code == 2);
  CHECK(storn_cli({}).code == 2);
  CHECK(storn_cli({"frobnicate"}).code == 2);
  CHECK(storn_cli({"eval", "--data", "x"}).code == 2);
  CHECK(storn_cli({"--help"}).code == 0);
}
