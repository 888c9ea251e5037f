#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "storn/checkpoint.hpp"
#include "storn/errors.hpp"

using namespace storn;
using namespace storn::testing;

TEST_CASE("checkpoint round trip") {
  std::mt19937_64 rng(11);
  for (auto mode : {RecognitionMode::causal, RecognitionMode::bidirectional}) {
    ModelSpec s;
    s.input = 3;
    s.hidden = 4;
    s.recog_hidden = 5;
    s.latent = 2;
    s.likelihood = Likelihood::gaussian;
    s.sigma_out = 0.37;
    s.recognition = mode;
    s.gen_transfer = Transfer::logistic;
    Checkpoint ck{random_model(s, rng), FeatureKind::real, ChannelStats{{0.1, -2.0, 3.5}, {1.0, 0.25, 7.0}},
                  {"a", "b", "c"}};
    std::stringstream buf;
    write_checkpoint(buf, ck);
    const Checkpoint back = read_checkpoint(buf);
    CHECK(back.kind == FeatureKind::real);
    CHECK(back.channel_names == ck.channel_names);
    REQUIRE(back.standardization);
    CHECK(back.standardization->mean == ck.standardization->mean);
    CHECK(back.standardization->std == ck.standardization->std);
    CHECK(back.model.spec.sigma_out == 0.37);
    CHECK(back.model.spec.recognition == mode);
    CHECK(back.model.spec.gen_transfer == Transfer::logistic);
    const auto a = parameters_of(ck.model), b = parameters_of(back.model);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].first == b[i].first);
      CHECK(a[i].second == b[i].second);
    }
  }
}

TEST_CASE("srnn checkpoint without statistics") {
  ModelSpec s;
  s.kind = ModelKind::srnn;
  s.input = 2;
  s.hidden = 3;
  Checkpoint ck{make_model(s, "default", 4), FeatureKind::binary, std::nullopt, {}};
  std::stringstream buf;
  write_checkpoint(buf, ck);
  const Checkpoint back = read_checkpoint(buf);
  CHECK(back.model.spec.kind == ModelKind::srnn);
  CHECK_FALSE(back.standardization);
  CHECK(parameters_of(back.model).size() == 5);
}

TEST_CASE("corrupt checkpoints are rejected") {
  ModelSpec s;
  s.input = 2;
  s.hidden = 3;
  s.recog_hidden = 3;
  s.latent = 1;
  Checkpoint ck{make_model(s, "default", 4), FeatureKind::binary, std::nullopt, {}};
  std::stringstream buf;
  write_checkpoint(buf, ck);
  const std::string bytes = buf.str();

  std::stringstream bad_magic("XTRNCKPT" + bytes.substr(8));
  CHECK_THROWS_AS(read_checkpoint(bad_magic), ParseError);
  std::stringstream truncated(bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(read_checkpoint(truncated), ParseError);
  std::stringstream empty;
  CHECK_THROWS_AS(read_checkpoint(empty), ParseError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/checkpoint.bin"), ParseError);
}
