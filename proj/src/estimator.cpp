#include "storn/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "storn/errors.hpp"
#include "storn/numeric.hpp"
#include "storn/seed.hpp"

namespace storn {

NllEstimate summarize_log_weights(const std::vector<double>& log_w) {
  if (log_w.empty()) throw ArgumentError("no importance weights");
  const double n = static_cast<double>(log_w.size());
  NllEstimate e;
  e.num_samples = log_w.size();
  const double lse = logsumexp(log_w);
  e.value = -(lse - std::log(n));

  double mean_lw = 0.0;
  for (double v : log_w) mean_lw += v;
  mean_lw /= n;
  double var_lw = 0.0;
  for (double v : log_w) var_lw += (v - mean_lw) * (v - mean_lw);
  e.log_weight_std = log_w.size() > 1 ? std::sqrt(var_lw / (n - 1.0)) : 0.0;

  // normalised weights w_i / max w, all in (0, 1]
  const double top = *std::max_element(log_w.begin(), log_w.end());
  double s1 = 0.0, s2 = 0.0;
  for (double v : log_w) {
    const double w = std::exp(v - top);
    s1 += w;
    s2 += w * w;
  }
  e.ess = s1 * s1 / s2;
  if (log_w.size() > 1) {
    const double mean_w = s1 / n;
    const double var_w = std::max(0.0, (s2 - n * mean_w * mean_w) / (n - 1.0));
    e.std_error = std::sqrt(var_w / n) / mean_w;
  }
  return e;
}

namespace {

Tensor replicate(const Tensor& seq, std::size_t rows) {
  const std::size_t T = seq.dim(0), K = seq.dim(1);
  Tensor out({T, rows, K});
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t k = 0; k < K; ++k) out.at(t, r, k) = seq.at(t, k);
  return out;
}

}  // namespace

ImportanceReport importance_nll(const StornModel& m, const SequenceBatch& x, const ImportanceOptions& opt) {
  if (opt.samples == 0) throw ArgumentError("importance_nll needs at least one sample");
  if (opt.chunk == 0) throw ArgumentError("importance_nll chunk must be positive");
  validate(m);
  if (x.values.rank() != 3 || x.features() != m.spec.input) {
    throw DimensionError("batch " + to_string(x.values.shape()) + " does not match model input width " +
                         std::to_string(m.spec.input));
  }
  ImportanceReport rep;
  const std::size_t S = opt.samples, lam = m.spec.latent;

  if (!m.spec.has_latent()) {
    const auto exact = srnn_nll(m, x);
    for (std::size_t b = 0; b < x.batch(); ++b) {
      NllEstimate e;
      e.value = exact.per_sequence[b];
      e.num_samples = S;
      e.ess = static_cast<double>(S);
      rep.per_sequence.push_back(e);
    }
  } else {
    const PosteriorStats stats = recognition_forward(m, x);
    for (std::size_t b = 0; b < x.batch(); ++b) {
      const std::size_t T = x.length(b);
      if (T == 0) {
        rep.per_sequence.push_back(NllEstimate{0.0, S, 0.0, static_cast<double>(S), 0.0});
        continue;
      }
      const Tensor seq = x.sequence(b);
      std::vector<double> log_w;
      log_w.reserve(S);
      for (std::size_t start = 0; start < S; start += opt.chunk) {
        const std::size_t rows = std::min(opt.chunk, S - start);
        const SequenceBatch rb{replicate(seq, rows), Tensor({T, rows}, 1.0)};
        Tensor z({T, rows, lam});
        std::vector<double> prior_ratio(rows, 0.0);  // log p(z) - log q(z)
        for (std::size_t r = 0; r < rows; ++r) {
          const std::uint64_t stream = (opt.index_offset + b) * S + start + r;
          std::mt19937_64 rng(stream_seed(opt.seed, stream));
          std::normal_distribution<double> n01;
          for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t k = 0; k < lam; ++k) {
              const double eps = n01(rng);
              const double mu = stats.mu.at(t, b, k), sigma = stats.sigma.at(t, b, k);
              const double zv = mu + sigma * eps;
              z.at(t, r, k) = zv;
              // log N(z; 0, 1) - log N(z; mu, sigma^2); the 2 pi terms cancel
              prior_ratio[r] += -0.5 * zv * zv + 0.5 * eps * eps + std::log(sigma);
            }
          }
        }
        const auto recon = preactivation_nll(m.spec, generative_preactivation(m, rb, z), rb);
        for (std::size_t r = 0; r < rows; ++r) log_w.push_back(-recon.per_sequence[r] + prior_ratio[r]);
      }
      rep.per_sequence.push_back(summarize_log_weights(log_w));
    }
  }
  double var = 0.0;
  for (std::size_t b = 0; b < x.batch(); ++b) {
    rep.lengths.push_back(x.length(b));
    rep.steps += rep.lengths.back();
    rep.total += rep.per_sequence[b].value;
    var += rep.per_sequence[b].std_error * rep.per_sequence[b].std_error;
  }
  rep.total_std_error = std::sqrt(var);
  return rep;
}

StdSearchResult std_search(const StornModel& m, const SequenceBatch& x, double lo, double hi, int iters,
                           const ImportanceOptions& opt) {
  if (m.spec.likelihood != Likelihood::gaussian) throw ArgumentError("std_search needs a gaussian likelihood");
  if (!(lo > 0.0) || !(lo < hi) || !std::isfinite(hi)) {
    throw ArgumentError("std_search needs 0 < lo < hi");
  }
  if (iters < 0) throw ArgumentError("std_search iterations must be non-negative");

  StdSearchResult res;
  StornModel probe = m;
  auto eval = [&](double log_sigma) {
    probe.spec.sigma_out = std::exp(log_sigma);
    const double nll = importance_nll(probe, x, opt).total;
    res.probes.emplace_back(probe.spec.sigma_out, nll);
    return nll;
  };

  double a = std::log(lo), b = std::log(hi);
  if (iters == 0) {
    const double mid = 0.5 * (a + b);
    res.nll = eval(mid);
    res.sigma = std::exp(mid);
    return res;
  }
  eval(a);
  eval(b);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = eval(c), fd = eval(d);
  for (int i = 1; i < iters; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  const auto best = std::min_element(res.probes.begin(), res.probes.end(),
                                     [](const auto& p, const auto& q) { return p.second < q.second; });
  res.sigma = best->first;
  res.nll = best->second;
  return res;
}

}  // namespace storn
