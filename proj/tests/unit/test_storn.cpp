#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "storn/errors.hpp"
#include "storn/storn.hpp"

using namespace storn;
using namespace storn::testing;

namespace {

ModelSpec small_spec(Likelihood lik = Likelihood::gaussian, RecognitionMode mode = RecognitionMode::causal) {
  ModelSpec s;
  s.input = 2;
  s.hidden = 4;
  s.recog_hidden = 3;
  s.latent = 2;
  s.likelihood = lik;
  s.recognition = mode;
  return s;
}

ModelSpec scalar_spec() {
  ModelSpec s;
  s.input = 1;
  s.hidden = 1;
  s.recog_hidden = 1;
  s.latent = 1;
  s.likelihood = Likelihood::gaussian;
  return s;
}

SequenceBatch column(std::initializer_list<double> xs) {
  Tensor seq({xs.size(), 1}, std::vector<double>(xs));
  return SequenceBatch::from_sequences(std::span<const Tensor>(&seq, 1));
}

}  // namespace

TEST_CASE("recognition with zero weights gives mu 0 and the floor sigma") {
  const StornModel m = make_model(small_spec(), "zero", 0);
  std::mt19937_64 rng(1);
  const auto stats = recognition_forward(m, random_batch(2, {4, 3}, rng));
  for (double v : stats.mu.data()) CHECK(v == 0.0);
  for (double v : stats.sigma.data()) CHECK(v == std::sqrt(kSigmaFloor));
}

TEST_CASE("recognition sigma ignores the sign of its raw output") {
  std::mt19937_64 rng(2);
  StornModel m = random_model(small_spec(), rng);
  const auto x = random_batch(2, {5, 5}, rng);
  const auto before = recognition_forward(m, x);
  const std::size_t lam = m.spec.latent;
  for (std::size_t j = 0; j < m.spec.recog_hidden; ++j) m.recog.w_out.at(j, lam + 1) *= -1.0;
  m.recog.b_out[lam + 1] *= -1.0;
  const auto after = recognition_forward(m, x);
  CHECK(after.sigma == before.sigma);
  CHECK(after.mu == before.mu);
}

TEST_CASE("recognition: scalar network by hand") {
  StornModel m = make_model(scalar_spec(), "zero", 0);
  m.recog.w_in = Tensor::matrix({{0.6}});
  m.recog.w_rec = Tensor::matrix({{-0.5}});
  m.recog.w_out = Tensor::matrix({{0.9, -1.3}});
  m.recog.b_hid = Tensor::vector({0.05});
  m.recog.b_out = Tensor::vector({0.1, 0.4});
  const auto stats = recognition_forward(m, column({1.0, -2.0}));
  CHECK(stats.mu[0] == doctest::Approx(0.6145029694766055).epsilon(1e-13));
  CHECK(stats.sigma[0] == doctest::Approx(0.34317241290731837).epsilon(1e-13));
  CHECK(stats.mu[1] == doctest::Approx(-0.7035705470790294).epsilon(1e-13));
  CHECK(stats.sigma[1] == doctest::Approx(1.560713332813848).epsilon(1e-13));
}

TEST_CASE("recognition modes respect their conditioning sets") {
  std::mt19937_64 rng(3);
  for (auto mode : {RecognitionMode::causal, RecognitionMode::lagged}) {
    const StornModel m = random_model(small_spec(Likelihood::gaussian, mode), rng);
    const auto x = random_batch(2, {6}, rng);
    const auto base = recognition_forward(m, x);
    for (std::size_t s = 0; s < 6; ++s) {
      auto y = x;
      y.values.at(s, 0, 1) += 0.7;
      const auto moved = recognition_forward(m, y);
      // causal: steps t < s unaffected; lagged: steps t <= s unaffected
      const std::size_t unaffected = mode == RecognitionMode::causal ? s : s + 1;
      for (std::size_t t = 0; t < unaffected; ++t) {
        for (std::size_t k = 0; k < 2; ++k) {
          CHECK(moved.mu.at(t, 0, k) == base.mu.at(t, 0, k));
          CHECK(moved.sigma.at(t, 0, k) == base.sigma.at(t, 0, k));
        }
      }
      if (unaffected < 6) CHECK(moved.mu.at(unaffected, 0, 0) != base.mu.at(unaffected, 0, 0));
    }
  }
  const StornModel bi = random_model(small_spec(Likelihood::gaussian, RecognitionMode::bidirectional), rng);
  const auto x = random_batch(2, {6}, rng);
  auto y = x;
  y.values.at(5, 0, 0) += 0.7;
  CHECK(recognition_forward(bi, y).mu.at(0, 0, 0) != recognition_forward(bi, x).mu.at(0, 0, 0));
}

TEST_CASE("sample_latents") {
  std::mt19937_64 rng(4);
  const StornModel m = random_model(small_spec(), rng);
  const auto x = random_batch(2, {3, 2}, rng);
  const auto stats = recognition_forward(m, x);
  CHECK(sample_latents(stats, Tensor(stats.mu.shape())) == stats.mu);

  PosteriorStats tight{stats.mu, Tensor(stats.mu.shape(), std::sqrt(kSigmaFloor))};
  const Tensor z = sample_latents(tight, standard_normal(stats.mu.shape(), rng));
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(std::abs(z[i] - stats.mu[i]) < 0.01);

  CHECK_THROWS_AS(sample_latents(stats, Tensor({1, 1, 1})), DimensionError);

  // Monte Carlo oracle at mu = 1, sigma = 2
  const std::size_t n = 100000;
  PosteriorStats fixed{Tensor({n, 1, 1}, 1.0), Tensor({n, 1, 1}, 2.0)};
  const Tensor draws = sample_latents(fixed, standard_normal({n, 1, 1}, rng));
  double mean = 0.0;
  for (double v : draws.data()) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : draws.data()) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n - 1));
  CHECK(std::abs(mean - 1.0) <= 0.02);
  CHECK(std::abs(sd - 2.0) <= 0.02);
}

TEST_CASE("generative_forward: scalar network by hand") {
  StornModel m = make_model(scalar_spec(), "zero", 0);
  m.gen.w_in = Tensor::matrix({{0.5}});
  m.gen.w_rec = Tensor::matrix({{0.8}});
  m.gen.w_out = Tensor::matrix({{1.5}});
  m.gen.b_hid = Tensor::vector({0.1});
  m.gen.b_out = Tensor::vector({-0.2});
  m.w_latent = Tensor::matrix({{0.7}});
  const Tensor z({2, 1, 1}, {0.3, -0.4});
  const Tensor y = generative_forward(m, column({1.0, -1.0}), z);
  // the first prediction sees x_0 = 0; the second sees x_1 = 1
  CHECK(y[0] == doctest::Approx(0.2506556457214812).epsilon(1e-13));
  CHECK(y[1] == doctest::Approx(0.5623552499728193).epsilon(1e-13));
}

TEST_CASE("generative_forward with zero latent map is an sRNN on the shifted input") {
  std::mt19937_64 rng(5);
  StornModel m = random_model(small_spec(Likelihood::bernoulli), rng);
  m.w_latent = Tensor(m.w_latent.shape());
  const auto x = random_batch(2, {5, 3}, rng, true);
  const Tensor y1 = generative_forward(m, x, standard_normal({5, 2, 2}, rng));
  const Tensor y2 = generative_forward(m, x, standard_normal({5, 2, 2}, rng));
  CHECK(y1 == y2);
  CHECK(y1 == rnn_forward(m.gen, shift_right(x)).outputs);
}

TEST_CASE("generative_forward: zero input and latents with no recurrence gives constant outputs") {
  std::mt19937_64 rng(6);
  StornModel m = random_model(small_spec(), rng);
  m.gen.w_rec = Tensor(m.gen.w_rec.shape());
  const SequenceBatch x{Tensor({6, 1, 2}), Tensor({6, 1}, 1.0)};
  const Tensor y = generative_forward(m, x, Tensor({6, 1, 2}));
  for (std::size_t t = 1; t < 6; ++t)
    for (std::size_t k = 0; k < 2; ++k) CHECK(y.at(t, 0, k) == y.at(0, 0, k));
}

TEST_CASE("kl_standard_normal examples") {
  const Tensor mask({1, 1}, 1.0);
  CHECK(kl_standard_normal({Tensor({1, 1, 1}, 0.0), Tensor({1, 1, 1}, 1.0)}, mask).total == 0.0);
  CHECK(kl_standard_normal({Tensor({1, 1, 1}, 1.0), Tensor({1, 1, 1}, 1.0)}, mask).total ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(kl_standard_normal({Tensor({1, 1, 1}, 0.0), Tensor({1, 1, 1}, 2.0)}, mask).total ==
        doctest::Approx(0.5 * (4.0 - std::log(4.0) - 1.0)).epsilon(1e-15));
  CHECK(0.5 * (4.0 - std::log(4.0) - 1.0) == doctest::Approx(0.806853).epsilon(1e-6));
}

TEST_CASE("kl_standard_normal agrees with a Monte Carlo estimate") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mu_d(-2.0, 2.0), sig_d(0.3, 3.0);
  std::normal_distribution<double> n01;
  for (int rep = 0; rep < 10; ++rep) {
    const double mu = mu_d(rng), sigma = sig_d(rng);
    const Tensor mask({1, 1}, 1.0);
    const double closed = kl_standard_normal({Tensor({1, 1, 1}, mu), Tensor({1, 1, 1}, sigma)}, mask).total;
    // E_q[log q(z) - log p(z)] with z = mu + sigma e
    const int n = 100000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = n01(rng), z = mu + sigma * e;
      const double d = -0.5 * e * e - std::log(sigma) + 0.5 * z * z;
      s += d;
      s2 += d * d;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean - closed) <= 3.0 * se);
  }
}

TEST_CASE("kl is non-negative and masked") {
  std::mt19937_64 rng(8);
  const StornModel m = random_model(small_spec(), rng);
  const auto x = random_batch(2, {6, 2, 4}, rng);
  const auto stats = recognition_forward(m, x);
  const auto kl = kl_standard_normal(stats, x.mask);
  for (double v : kl.per_sequence) CHECK(v >= 0.0);

  const Tensor seq = x.sequence(1);
  const auto alone = SequenceBatch::from_sequences(std::span<const Tensor>(&seq, 1));
  CHECK(kl_standard_normal(recognition_forward(m, alone), alone.mask).total == kl.per_sequence[1]);
}

TEST_CASE("bound report is consistent") {
  std::mt19937_64 rng(9);
  const StornModel m = random_model(small_spec(Likelihood::bernoulli), rng);
  const auto x = random_batch(2, {5, 3, 4}, rng, true);
  const auto r = storn_bound(m, x, standard_normal({5, 3, 2}, rng));
  REQUIRE(r.bound.size() == 3);
  for (std::size_t b = 0; b < 3; ++b) {
    CHECK(r.bound[b] == r.kl[b] + r.recon_nll[b]);
    CHECK(r.kl[b] >= 0.0);
  }
  CHECK(r.lengths == std::vector<std::size_t>{5, 3, 4});
  CHECK(r.steps == 12);
  CHECK_THROWS_AS(storn_bound(m, x, Tensor({5, 3, 1})), DimensionError);
  std::mt19937_64 r2(1);
  CHECK_THROWS_AS(storn_bound(m, random_batch(3, {2}, r2), Tensor({2, 1, 2})), DimensionError);
}

TEST_CASE("zero latent map: reconstruction is noise-independent and equals the sRNN") {
  std::mt19937_64 rng(10);
  for (auto lik : {Likelihood::bernoulli, Likelihood::gaussian}) {
    StornModel m = random_model(small_spec(lik, RecognitionMode::bidirectional), rng);
    m.w_latent = Tensor(m.w_latent.shape());
    const auto x = random_batch(2, {6, 4}, rng, lik == Likelihood::bernoulli);
    const auto a = storn_bound(m, x, standard_normal({6, 2, 2}, rng));
    const auto b = storn_bound(m, x, standard_normal({6, 2, 2}, rng));
    CHECK(a.recon_nll == b.recon_nll);
    CHECK(a.recon_nll == srnn_nll(m, x).per_sequence);

    ModelSpec base = m.spec;
    base.kind = ModelKind::srnn;
    base.latent = 0;
    StornModel plain = make_model(base, "zero", 0);
    plain.gen = m.gen;
    const auto c = storn_bound(plain, x, Tensor());
    CHECK(c.recon_nll == a.recon_nll);
    for (double v : c.kl) CHECK(v == 0.0);
  }
}

TEST_CASE("prior-matching recognition and zero latent map: bound equals the sRNN NLL") {
  std::mt19937_64 rng(11);
  StornModel m = make_model(small_spec(), "default", 3);
  m.w_latent = Tensor(m.w_latent.shape());
  m.recog.w_out = Tensor(m.recog.w_out.shape());
  m.recog.b_out = Tensor::vector({0.0, 0.0, std::sqrt(1.0 - kSigmaFloor), std::sqrt(1.0 - kSigmaFloor)});
  const auto x = random_batch(2, {4, 3}, rng);
  const auto r = storn_bound(m, x, standard_normal({4, 2, 2}, rng));
  for (double v : r.kl) CHECK(std::abs(v) <= 1e-15);
  CHECK(r.recon_nll == srnn_nll(m, x).per_sequence);
}

TEST_CASE("bound gradients match finite differences") {
  std::mt19937_64 rng(12);
  const RecognitionMode modes[] = {RecognitionMode::causal, RecognitionMode::lagged,
                                   RecognitionMode::bidirectional};
  for (int rep = 0; rep < 6; ++rep) {
    ModelSpec s;
    s.input = 1 + rep % 3;
    s.hidden = 2 + rep;
    s.recog_hidden = 2 + rep % 4;
    s.latent = 1 + rep % 4;
    s.likelihood = rep % 2 ? Likelihood::bernoulli : Likelihood::gaussian;
    s.sigma_out = 0.7;
    s.recognition = modes[rep % 3];
    s.gen_transfer = rep % 2 ? Transfer::logistic : Transfer::tanh;
    const StornModel m = random_model(s, rng);
    const std::size_t T = 3 + rep;
    const auto x = random_batch(s.input, {T, T - 2}, rng, s.likelihood == Likelihood::bernoulli);
    const auto res = check_bound_gradient(m, x, standard_normal({T, 2, s.latent}, rng));
    CHECK_MESSAGE(res.ok, "worst relative error ", res.worst);
  }
}

TEST_CASE("srnn model: gradient and parameter set") {
  std::mt19937_64 rng(13);
  ModelSpec s;
  s.kind = ModelKind::srnn;
  s.input = 3;
  s.hidden = 5;
  s.likelihood = Likelihood::bernoulli;
  const StornModel m = random_model(s, rng);
  CHECK(parameters_of(m).size() == 5);
  const auto x = random_batch(3, {4, 6}, rng, true);
  CHECK(check_bound_gradient(m, x, Tensor()).ok);
  CHECK_THROWS_AS(recognition_forward(m, x), ArgumentError);
}

TEST_CASE("parameter naming and assignment") {
  std::mt19937_64 rng(14);
  const StornModel m = random_model(small_spec(Likelihood::gaussian, RecognitionMode::bidirectional), rng);
  const auto named = parameters_of(m);
  REQUIRE(named.size() == 16);
  CHECK(named[0].first == "gen.w_in");
  CHECK(named[5].first == "gen.w_latent");
  CHECK(named[6].first == "recog.w_in");
  CHECK(named[15].first == "recog_bwd.b_out");

  StornModel other = make_model(m.spec, "zero", 0);
  assign_parameters(other, named);
  CHECK(parameters_of(other) == named);

  NamedTensors bad = named;
  bad[1].second = Tensor({1, 1});
  CHECK_THROWS_AS(assign_parameters(other, bad), DimensionError);
  bad = named;
  bad.pop_back();
  CHECK_THROWS_AS(assign_parameters(other, bad), ParseError);
}

TEST_CASE("model spec validation") {
  ModelSpec s = small_spec();
  s.latent = 0;
  CHECK_THROWS_AS(make_model(s, "default", 1), ConfigError);
  s = small_spec();
  s.sigma_out = 0.0;
  CHECK_THROWS_AS(make_model(s, "default", 1), ConfigError);
  CHECK_THROWS_AS(make_model(small_spec(), "fancy", 1), ConfigError);
  CHECK_THROWS_AS(parse_recognition_mode("sideways"), ConfigError);
  CHECK(parse_recognition_mode("lagged") == RecognitionMode::lagged);
}
