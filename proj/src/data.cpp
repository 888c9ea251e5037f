#include "storn/data.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "storn/errors.hpp"

namespace storn {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string located(const std::string& source, std::size_t line, const std::string& msg) {
  return source + ":" + std::to_string(line) + ": " + msg;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::size_t Dataset::total_steps() const {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.dim(0);
  return n;
}

void Dataset::validate() const {
  if (ids.size() != sequences.size()) throw ValidationError("dataset ids and sequences differ in number");
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const Tensor& s = sequences[i];
    if (s.rank() != 2 || s.dim(1) != channels) {
      throw ValidationError("sequence " + std::to_string(i) + " has shape " + to_string(s.shape()) +
                            ", expected length x " + std::to_string(channels));
    }
    if (!s.all_finite()) throw ValidationError("sequence " + std::to_string(i) + " has non-finite values");
    if (kind == FeatureKind::binary) {
      for (double v : s.data()) {
        if (v != 0.0 && v != 1.0) throw ValidationError("binary sequence " + std::to_string(i) + " holds " + format_double(v));
      }
    }
  }
  if (standardization && kind != FeatureKind::real) {
    throw ValidationError("standardisation statistics on a binary dataset");
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.kind = kind;
  out.channels = channels;
  out.channel_names = channel_names;
  out.standardization = standardization;
  out.oracle.step_nll = oracle.step_nll;
  out.oracle.factorized_step_nll = oracle.factorized_step_nll;
  for (std::size_t i : indices) {
    if (i >= sequences.size()) throw ArgumentError("subset index " + std::to_string(i) + " out of range");
    out.sequences.push_back(sequences[i]);
    out.ids.push_back(ids[i]);
    if (!oracle.sequence_nll.empty()) out.oracle.sequence_nll.push_back(oracle.sequence_nll[i]);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// ---- event format ----

Dataset parse_event_sequences(std::istream& in, std::size_t channels, const std::string& source) {
  if (channels == 0) throw ArgumentError("event range needs at least one channel");
  Dataset ds;
  ds.kind = FeatureKind::binary;
  ds.channels = channels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto steps = split(line, ';');
    Tensor seq({steps.size(), channels});
    for (std::size_t t = 0; t < steps.size(); ++t) {
      const auto field = trim(steps[t]);
      if (field.empty()) continue;
      for (auto tok : split(field, ',')) {
        tok = trim(tok);
        long long idx = 0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), idx);
        if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
          throw ParseError(located(source, lineno, "step " + std::to_string(t + 1) + ": '" + std::string(tok) +
                                                       "' is not an event index"));
        }
        if (idx < 0 || static_cast<unsigned long long>(idx) >= channels) {
          throw ParseError(located(source, lineno, "event index " + std::to_string(idx) + " outside [0, " +
                                                       std::to_string(channels) + ")"));
        }
        seq.at(t, static_cast<std::size_t>(idx)) = 1.0;
      }
    }
    ds.ids.push_back(std::to_string(ds.sequences.size()));
    ds.sequences.push_back(std::move(seq));
  }
  if (in.bad()) throw ParseError(source + ": read error");
  return ds;
}

Dataset load_event_sequences(const std::filesystem::path& path, std::size_t channels) {
  auto in = open_input(path);
  return parse_event_sequences(in, channels, path.string());
}

std::vector<std::size_t> events_of(std::span<const double> step) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < step.size(); ++k)
    if (step[k] >= 0.5) out.push_back(k);
  return out;
}

void write_event_sequences(std::ostream& out, const Dataset& ds) {
  for (const Tensor& seq : ds.sequences) {
    for (std::size_t t = 0; t < seq.dim(0); ++t) {
      if (t) out << ';';
      const auto ev = events_of(seq.data().subspan(t * seq.dim(1), seq.dim(1)));
      for (std::size_t i = 0; i < ev.size(); ++i) out << (i ? "," : "") << ev[i];
    }
    out << '\n';
  }
}

void save_event_sequences(const std::filesystem::path& path, const Dataset& ds) {
  auto out = open_output(path);
  write_event_sequences(out, ds);
  if (!out) throw ParseError("failed writing '" + path.string() + "'");
}

// ---- real format ----

Dataset parse_real_sequences(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    for (auto c : split(line, ',')) header.emplace_back(trim(c));
    break;
  }
  if (header.empty()) throw ParseError(source + ": missing header row");
  const auto id_it = std::find(header.begin(), header.end(), "seq_id");
  if (id_it == header.end()) throw ParseError(located(source, lineno, "header has no seq_id column"));
  const std::size_t id_col = static_cast<std::size_t>(id_it - header.begin());

  Dataset ds;
  ds.kind = FeatureKind::real;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != id_col) ds.channel_names.push_back(header[c]);
  ds.channels = ds.channel_names.size();
  if (ds.channels == 0) throw ParseError(located(source, lineno, "header has no channel columns"));

  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw ParseError(located(source, lineno, "row has " + std::to_string(cells.size()) + " cells, header has " +
                                                   std::to_string(header.size())));
    }
    const std::string id(trim(cells[id_col]));
    if (id.empty()) throw ParseError(located(source, lineno, "empty seq_id"));
    auto [it, fresh] = slot.try_emplace(id, ds.ids.size());
    if (fresh) {
      ds.ids.push_back(id);
      rows.emplace_back();
    }
    auto& dst = rows[it->second];
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == id_col) continue;
      const auto tok = trim(cells[c]);
      double v = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        throw ParseError(located(source, lineno, "column " + std::to_string(c + 1) + " ('" + header[c] +
                                                     "'): '" + std::string(tok) + "' is not a finite number"));
      }
      dst.push_back(v);
    }
  }
  if (in.bad()) throw ParseError(source + ": read error");
  for (auto& r : rows) {
    const std::size_t len = r.size() / ds.channels;
    ds.sequences.emplace_back(Shape{len, ds.channels}, std::move(r));
  }
  return ds;
}

Dataset load_real_sequences(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_real_sequences(in, path.string());
}

void write_real_sequences(std::ostream& out, const Dataset& ds) {
  out << "seq_id";
  for (std::size_t k = 0; k < ds.channels; ++k) {
    out << ',' << (k < ds.channel_names.size() ? ds.channel_names[k] : "c" + std::to_string(k));
  }
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Tensor& s = ds.sequences[i];
    const std::string id = i < ds.ids.size() ? ds.ids[i] : std::to_string(i);
    for (std::size_t t = 0; t < s.dim(0); ++t) {
      out << id;
      for (std::size_t k = 0; k < s.dim(1); ++k) out << ',' << format_double(s.at(t, k));
      out << '\n';
    }
  }
}

void save_real_sequences(const std::filesystem::path& path, const Dataset& ds) {
  auto out = open_output(path);
  write_real_sequences(out, ds);
  if (!out) throw ParseError("failed writing '" + path.string() + "'");
}

// ---- standardisation ----

ChannelStats fit_standardization(const Dataset& ds) {
  if (ds.kind != FeatureKind::real) throw ArgumentError("standardisation applies to real-valued data only");
  const std::size_t n = ds.total_steps();
  if (n == 0) throw ArgumentError("cannot standardise an empty dataset");
  ChannelStats st{std::vector<double>(ds.channels, 0.0), std::vector<double>(ds.channels, 0.0)};
  for (const auto& s : ds.sequences)
    for (std::size_t t = 0; t < s.dim(0); ++t)
      for (std::size_t k = 0; k < ds.channels; ++k) st.mean[k] += s.at(t, k);
  for (auto& m : st.mean) m /= static_cast<double>(n);
  for (const auto& s : ds.sequences)
    for (std::size_t t = 0; t < s.dim(0); ++t)
      for (std::size_t k = 0; k < ds.channels; ++k) {
        const double d = s.at(t, k) - st.mean[k];
        st.std[k] += d * d;
      }
  for (auto& v : st.std) v = std::max(std::sqrt(v / static_cast<double>(n)), kStdFloor);
  return st;
}

namespace {

void check_stats(const Dataset& ds, const ChannelStats& st) {
  if (st.mean.size() != ds.channels || st.std.size() != ds.channels) {
    throw DimensionError("standardisation statistics cover " + std::to_string(st.mean.size()) +
                         " channels, data has " + std::to_string(ds.channels));
  }
}

}  // namespace

Dataset standardize(const Dataset& ds, const ChannelStats& st) {
  check_stats(ds, st);
  Dataset out = ds;
  for (auto& s : out.sequences)
    for (std::size_t t = 0; t < s.dim(0); ++t)
      for (std::size_t k = 0; k < s.dim(1); ++k) s.at(t, k) = (s.at(t, k) - st.mean[k]) / st.std[k];
  out.standardization = st;
  return out;
}

Tensor destandardize(const Tensor& seq, const ChannelStats& st) {
  if (seq.rank() != 2 || seq.dim(1) != st.mean.size()) {
    throw DimensionError("sequence " + to_string(seq.shape()) + " does not match standardisation statistics");
  }
  Tensor out = seq;
  for (std::size_t t = 0; t < out.dim(0); ++t)
    for (std::size_t k = 0; k < out.dim(1); ++k) out.at(t, k) = out.at(t, k) * st.std[k] + st.mean[k];
  return out;
}

Dataset destandardize(const Dataset& ds, const ChannelStats& st) {
  check_stats(ds, st);
  Dataset out = ds;
  for (auto& s : out.sequences) s = destandardize(s, st);
  out.standardization.reset();
  return out;
}

// ---- batching and splits ----

SequenceBatch to_batch(const Dataset& ds, const std::vector<std::size_t>& indices) {
  std::vector<Tensor> seqs;
  seqs.reserve(indices.size());
  for (std::size_t i : indices) seqs.push_back(ds.sequences.at(i));
  if (seqs.empty()) return SequenceBatch{Tensor({0, 0, ds.channels}), Tensor({0, 0})};
  return SequenceBatch::from_sequences(seqs);
}

SequenceBatch to_batch(const Dataset& ds) {
  std::vector<std::size_t> all(ds.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return to_batch(ds, all);
}

namespace {

std::vector<Batch> group(const Dataset& ds, const std::vector<std::size_t>& order, std::size_t batch_size) {
  if (batch_size == 0) throw ArgumentError("batch size must be at least 1");
  std::vector<Batch> out;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                 order.begin() + static_cast<std::ptrdiff_t>(end));
    out.push_back(Batch{to_batch(ds, idx), idx});
  }
  return out;
}

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

std::vector<Batch> make_batches(const Dataset& ds, std::size_t batch_size, std::uint64_t seed) {
  auto order = iota_indices(ds.size());
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return group(ds, order, batch_size);
}

std::vector<Batch> ordered_batches(const Dataset& ds, std::size_t batch_size) {
  return group(ds, iota_indices(ds.size()), batch_size);
}

SplitIndices split_indices(std::size_t n, std::uint64_t seed) {
  auto order = iota_indices(n);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_val = n / 10, n_test = n / 10;
  const std::size_t n_train = n - n_val - n_test;
  auto range = [&](std::size_t b, std::size_t e) {
    std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(b),
                                 order.begin() + static_cast<std::ptrdiff_t>(e));
    std::sort(idx.begin(), idx.end());
    return idx;
  };
  return SplitIndices{range(0, n_train), range(n_train, n_train + n_val), range(n_train + n_val, n)};
}

Split apply_split(const Dataset& ds, const SplitIndices& idx) {
  return Split{ds.subset(idx.train), ds.subset(idx.validation), ds.subset(idx.test)};
}

Split split_dataset(const Dataset& ds, std::uint64_t seed) { return apply_split(ds, split_indices(ds.size(), seed)); }

SplitIndices read_split_manifest(std::size_t n, std::istream& in, const std::string& source) {
  std::vector<int> assigned(n, -1);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = std::string_view(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    std::istringstream fields{std::string(body)};
    std::string index_tok, part, extra;
    fields >> index_tok >> part;
    if (part.empty() || (fields >> extra)) {
      throw ParseError(located(source, lineno, "expected '<sequence index> <train|validation|test>'"));
    }
    std::size_t idx = 0;
    const auto res = std::from_chars(index_tok.data(), index_tok.data() + index_tok.size(), idx);
    if (res.ec != std::errc() || res.ptr != index_tok.data() + index_tok.size()) {
      throw ParseError(located(source, lineno, "'" + index_tok + "' is not a sequence index"));
    }
    if (idx >= n) {
      throw ParseError(located(source, lineno, "sequence index " + index_tok + " outside dataset of " +
                                                   std::to_string(n)));
    }
    int which = part == "train" ? 0 : part == "validation" ? 1 : part == "test" ? 2 : -1;
    if (which < 0) throw ParseError(located(source, lineno, "unknown split '" + part + "'"));
    if (assigned[idx] >= 0) throw ParseError(located(source, lineno, "sequence " + index_tok + " assigned twice"));
    assigned[idx] = which;
  }
  SplitIndices out;
  std::vector<std::size_t>* parts[3] = {&out.train, &out.validation, &out.test};
  for (std::size_t i = 0; i < n; ++i) {
    if (assigned[i] < 0) throw ParseError(source + ": sequence " + std::to_string(i) + " not assigned to a split");
    parts[assigned[i]]->push_back(i);
  }
  return out;
}

SplitIndices read_split_manifest(std::size_t n, const std::filesystem::path& manifest) {
  auto in = open_input(manifest);
  return read_split_manifest(n, in, manifest.string());
}

void write_split_manifest(std::ostream& out, const SplitIndices& idx) {
  std::vector<std::pair<std::size_t, const char*>> rows;
  for (auto i : idx.train) rows.emplace_back(i, "train");
  for (auto i : idx.validation) rows.emplace_back(i, "validation");
  for (auto i : idx.test) rows.emplace_back(i, "test");
  std::sort(rows.begin(), rows.end());
  for (const auto& [i, part] : rows) out << i << ' ' << part << '\n';
}

Split split_from_manifest(const Dataset& ds, std::istream& in, const std::string& source) {
  return apply_split(ds, read_split_manifest(ds.size(), in, source));
}

Split split_from_manifest(const Dataset& ds, const std::filesystem::path& manifest) {
  return apply_split(ds, read_split_manifest(ds.size(), manifest));
}

// ---- synthetic data ----

Dataset synth_coupled_binary(std::size_t n, std::size_t steps, std::size_t channels, std::uint64_t seed) {
  if (channels < 2) throw ArgumentError("coupled data needs at least two channels");
  if (steps == 0) throw ArgumentError("coupled data needs at least one step");
  Dataset ds;
  ds.kind = FeatureKind::binary;
  ds.channels = channels;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < n; ++i) {
    Tensor s({steps, channels});
    for (std::size_t t = 0; t < steps; ++t) {
      if (!coin(rng)) continue;
      for (std::size_t k = 0; k < channels; ++k) s.at(t, k) = 1.0;
    }
    ds.sequences.push_back(std::move(s));
    ds.ids.push_back(std::to_string(i));
  }
  ds.oracle.step_nll = std::numbers::ln2;
  ds.oracle.factorized_step_nll = static_cast<double>(channels) * std::numbers::ln2;
  return ds;
}

GaussianMarginal linear_gaussian_marginal(const LinearGaussianParams& p, std::size_t steps) {
  if (steps == 0 || steps > kLinearGaussianMaxSteps) {
    throw ArgumentError("linear-gaussian oracle supports 1 to " + std::to_string(kLinearGaussianMaxSteps) + " steps");
  }
  // Each quantity is an affine function of the 2T independent unit
  // Gaussians (z_1..z_T, e_1..e_T): constant c plus loadings over sources.
  const std::size_t src = 2 * steps;
  struct Affine {
    double c = 0.0;
    std::vector<double> w;
  };
  Affine h{0.0, std::vector<double>(src, 0.0)};
  Affine x_prev{0.0, std::vector<double>(src, 0.0)};
  std::vector<Affine> xs;
  for (std::size_t t = 0; t < steps; ++t) {
    Affine hn{p.w_in * x_prev.c + p.w_rec * h.c + p.b_hid, std::vector<double>(src, 0.0)};
    for (std::size_t j = 0; j < src; ++j) hn.w[j] = p.w_in * x_prev.w[j] + p.w_rec * h.w[j];
    hn.w[t] += p.w_lat;
    Affine xn{p.w_out * hn.c + p.b_out, std::vector<double>(src, 0.0)};
    for (std::size_t j = 0; j < src; ++j) xn.w[j] = p.w_out * hn.w[j];
    xn.w[steps + t] += p.sigma_out;
    h = hn;
    x_prev = xn;
    xs.push_back(xn);
  }
  GaussianMarginal g;
  g.cov.assign(steps, std::vector<double>(steps, 0.0));
  for (std::size_t i = 0; i < steps; ++i) {
    g.mean.push_back(xs[i].c);
    for (std::size_t j = 0; j < steps; ++j)
      for (std::size_t s = 0; s < src; ++s) g.cov[i][j] += xs[i].w[s] * xs[j].w[s];
  }
  return g;
}

namespace {

Eigen::LLT<Eigen::MatrixXd> factor(const GaussianMarginal& g) {
  const auto n = static_cast<Eigen::Index>(g.mean.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = g.cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) throw NumericalError("linear-gaussian covariance is not positive definite");
  return llt;
}

double half_log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

double linear_gaussian_nll(const LinearGaussianParams& p, std::span<const double> x) {
  const auto g = linear_gaussian_marginal(p, x.size());
  const auto llt = factor(g);
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = x[static_cast<std::size_t>(i)] - g.mean[static_cast<std::size_t>(i)];
  const Eigen::VectorXd u = llt.matrixL().solve(r);
  return 0.5 * u.squaredNorm() + half_log_det(llt) + 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

double linear_gaussian_entropy(const LinearGaussianParams& p, std::size_t steps) {
  const auto llt = factor(linear_gaussian_marginal(p, steps));
  return half_log_det(llt) + 0.5 * static_cast<double>(steps) * (1.0 + std::log(2.0 * std::numbers::pi));
}

Dataset synth_linear_gaussian(std::size_t n, std::size_t steps, std::uint64_t seed, const LinearGaussianParams& p) {
  if (steps == 0 || steps > kLinearGaussianMaxSteps) {
    throw ArgumentError("linear-gaussian data supports 1 to " + std::to_string(kLinearGaussianMaxSteps) + " steps");
  }
  if (!(p.sigma_out > 0.0)) throw ArgumentError("linear-gaussian sigma_out must be positive");
  Dataset ds;
  ds.kind = FeatureKind::real;
  ds.channels = 1;
  ds.channel_names = {"x"};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor s({steps, 1});
    double h = 0.0, x = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
      const double z = n01(rng);
      h = p.w_in * x + p.w_rec * h + p.w_lat * z + p.b_hid;
      x = p.w_out * h + p.b_out + p.sigma_out * n01(rng);
      s[t] = x;
    }
    ds.oracle.sequence_nll.push_back(linear_gaussian_nll(p, s.data()));
    ds.sequences.push_back(std::move(s));
    ds.ids.push_back(std::to_string(i));
  }
  return ds;
}

Dataset synth_sines(std::size_t n, std::size_t steps, std::size_t channels, double noise, std::uint64_t seed) {
  if (channels == 0 || steps == 0) throw ArgumentError("sines need positive steps and channels");
  if (noise < 0.0) throw ArgumentError("noise level must be non-negative");
  Dataset ds;
  ds.kind = FeatureKind::real;
  ds.channels = channels;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(0.15, 0.45), amp(0.7, 1.3), phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> n01;
  std::vector<double> f(channels), a(channels);
  for (std::size_t k = 0; k < channels; ++k) {
    f[k] = freq(rng);
    a[k] = amp(rng);
    ds.channel_names.push_back("s" + std::to_string(k));
  }
  for (std::size_t i = 0; i < n; ++i) {
    Tensor s({steps, channels});
    for (std::size_t k = 0; k < channels; ++k) {
      const double ph = phase(rng);
      for (std::size_t t = 0; t < steps; ++t) {
        s.at(t, k) = a[k] * std::sin(f[k] * static_cast<double>(t) + ph) + noise * n01(rng);
      }
    }
    ds.sequences.push_back(std::move(s));
    ds.ids.push_back(std::to_string(i));
  }
  return ds;
}

}  // namespace storn
