#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "storn/cli.hpp"
#include "storn/errors.hpp"
#include "storn/estimator.hpp"
#include "storn/seed.hpp"
#include "storn/tasks.hpp"

namespace storn::cli {

namespace fs = std::filesystem;

namespace {

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    // ArgumentError, DimensionError, ValidationError
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
}

DataFormat format_of(const Checkpoint& ck) {
  return ck.kind == FeatureKind::binary ? DataFormat::events : DataFormat::real;
}

// Data as the model sees it: width checked, standardised with the
// checkpoint's statistics.
Dataset model_view(const Checkpoint& ck, const Dataset& raw, const fs::path& source) {
  if (raw.channels != ck.model.spec.input) {
    throw DimensionError("'" + source.string() + "' has " + std::to_string(raw.channels) +
                         " channels, the checkpoint expects " + std::to_string(ck.model.spec.input));
  }
  if (ck.standardization) return standardize(raw, *ck.standardization);
  return raw;
}

Dataset load_for(const Checkpoint& ck, const fs::path& path) {
  return load_dataset(path, format_of(ck), ck.model.spec.input);
}

std::size_t event_count(const Tensor& seq, FeatureKind kind) {
  if (kind == FeatureKind::real) return seq.size();
  std::size_t n = 0;
  for (double v : seq.data()) n += v >= 0.5 ? 1 : 0;
  return n;
}

std::string per(double total, std::size_t n) {
  return n ? format_double(total / static_cast<double>(n)) : "nan";
}

SequenceBatch destandardized(const SequenceBatch& x, const std::optional<ChannelStats>& stats) {
  if (!stats) return x;
  SequenceBatch out = x;
  for (std::size_t t = 0; t < x.steps(); ++t)
    for (std::size_t b = 0; b < x.batch(); ++b)
      for (std::size_t k = 0; k < x.features(); ++k) {
        auto& v = out.values.at(t, b, k);
        v = v * stats->std[k] + stats->mean[k];
      }
  return out;
}

std::string file_ext(FeatureKind kind) { return kind == FeatureKind::binary ? ".txt" : ".csv"; }

}  // namespace

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig c = load_run_config(opt.config);
    const Dataset ds = load_dataset(c.data.path, c.data.format, c.data.channels);
    if (ds.empty()) throw ConfigError("data file '" + c.data.path.string() + "' holds no sequences");

    const SplitIndices idx = c.data.split_manifest ? read_split_manifest(ds.size(), *c.data.split_manifest)
                                                   : split_indices(ds.size(), derive_seed(c.seed, "split"));
    Split split = apply_split(ds, idx);
    if (split.train.empty()) throw ConfigError("training split is empty");
    std::optional<ChannelStats> stats;
    if (c.data.format == DataFormat::real && c.data.standardize) {
      stats = fit_standardization(split.train);
      split.train = standardize(split.train, *stats);
      split.validation = standardize(split.validation, *stats);
    }

    const StornModel init = make_model(c.model_spec(ds.channels), c.model.init, derive_seed(c.seed, "init"));

    fs::create_directories(c.output_dir);
    fs::remove(c.output_dir / "manifest.txt");

    const auto on_epoch = [&](const EpochLog& e) {
      if (opt.quiet) return;
      out << "epoch " << e.epoch << "  train " << format_double(e.train_bound) << "  val "
          << format_double(e.val_bound) << "  (" << e.seconds << " s)\n";
    };
    const FitResult r = fit(init, split.train, split.validation, c.train, on_epoch);

    Checkpoint ck{r.best, ds.kind, stats, ds.channel_names};
    save_checkpoint(c.output_dir / "checkpoint.bin", ck);
    std::ostringstream log, timing, split_txt;
    write_training_log(log, r.log);
    write_timing_log(timing, r.log);
    write_split_manifest(split_txt, idx);
    write_text(c.output_dir / "log.csv", log.str());
    write_text(c.output_dir / "timing.csv", timing.str());
    write_text(c.output_dir / "split.txt", split_txt.str());
    write_text(c.output_dir / "config.json", to_json(c).dump(2) + "\n");
    write_manifest(c.output_dir, {"checkpoint.bin", "log.csv", "timing.csv", "split.txt", "config.json"});
    if (!opt.quiet) {
      out << "best epoch " << r.best_epoch << (r.early_stopped ? " (early stop)" : "") << ", wrote "
          << c.output_dir.string() << '\n';
    }
    return int(kOk);
  });
}

int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.samples == 0) throw ArgumentError("--samples must be positive");
    if (opt.bound_samples == 0) throw ArgumentError("--bound-samples must be positive");
    const Checkpoint ck = load_checkpoint(opt.checkpoint);
    Dataset raw = load_for(ck, opt.data);
    if (opt.split) {
      const Split sp = split_from_manifest(raw, *opt.split);
      if (opt.part == "train") raw = sp.train;
      else if (opt.part == "validation") raw = sp.validation;
      else if (opt.part == "test") raw = sp.test;
      else throw ArgumentError("unknown split part '" + opt.part + "'");
    }
    if (raw.empty()) throw ArgumentError("no sequences to evaluate in '" + opt.data.string() + "'");
    const Dataset ds = model_view(ck, raw, opt.data);
    const StornModel& m = ck.model;

    const std::size_t n = ds.size(), R = opt.bound_samples;
    std::vector<double> bound_sum(n, 0.0), bound_sq(n, 0.0), kl(n, 0.0), recon(n, 0.0);
    std::vector<NllEstimate> nll(n);
    const std::uint64_t bound_seed = derive_seed(opt.seed, "bound");
    for (const auto& batch : ordered_batches(ds, 32)) {
      const auto& x = batch.data;
      for (std::size_t r = 0; r < R; ++r) {
        const Tensor eps = batch_noise(x.steps(), m.spec.latent, batch.indices, stream_seed(bound_seed, r));
        const BoundReport rep = storn_bound(m, x, eps);
        for (std::size_t b = 0; b < batch.indices.size(); ++b) {
          const std::size_t i = batch.indices[b];
          bound_sum[i] += rep.bound[b];
          bound_sq[i] += rep.bound[b] * rep.bound[b];
          kl[i] += rep.kl[b];
          recon[i] += rep.recon_nll[b];
        }
      }
      ImportanceOptions io;
      io.samples = opt.samples;
      io.seed = derive_seed(opt.seed, "importance");
      io.index_offset = batch.indices.front();
      const ImportanceReport rep = importance_nll(m, x, io);
      for (std::size_t b = 0; b < batch.indices.size(); ++b) nll[batch.indices[b]] = rep.per_sequence[b];
    }

    // one-step-ahead prediction error in model space, gaussian outputs only
    const bool gaussian = m.spec.likelihood == Likelihood::gaussian;
    std::vector<double> mse_map(n, 0.0), mse_prior(n, 0.0);
    if (gaussian) {
      for (std::size_t i = 0; i < n; ++i) {
        const SequenceBatch x = to_batch(ds, {i});
        mse_map[i] = one_step_mse(m, x, OneStepMode::map_latent);
        mse_prior[i] = one_step_mse(m, x, OneStepMode::prior_mean);
      }
    }

    std::ostringstream csv;
    csv << "seq_id,steps,events,bound,bound_std_error,kl,recon,bound_per_step,bound_per_event,"
           "nll,nll_std_error,nll_per_step,nll_per_event,ess,log_weight_std"
        << (gaussian ? ",mse_map,mse_prior\n" : "\n");
    double tb = 0, tb_var = 0, tkl = 0, trec = 0, tn = 0, tn_var = 0, tess = 0, tlw = 0, tmap = 0, tprior = 0;
    std::size_t tsteps = 0, tevents = 0;
    const double Rd = static_cast<double>(R);
    for (std::size_t i = 0; i < n; ++i) {
      const double mean = bound_sum[i] / Rd;
      const double var = R > 1 ? std::max(0.0, (bound_sq[i] - Rd * mean * mean) / (Rd - 1.0)) : 0.0;
      const double se = std::sqrt(var / Rd);
      const std::size_t steps = ds.sequences[i].shape()[0];
      const std::size_t events = event_count(raw.sequences[i], raw.kind);
      csv << ds.ids[i] << ',' << steps << ',' << events << ',' << format_double(mean) << ',' << format_double(se)
          << ',' << format_double(kl[i] / Rd) << ',' << format_double(recon[i] / Rd) << ',' << per(mean, steps)
          << ',' << per(mean, events) << ',' << format_double(nll[i].value) << ','
          << format_double(nll[i].std_error) << ',' << per(nll[i].value, steps) << ',' << per(nll[i].value, events)
          << ',' << format_double(nll[i].ess) << ',' << format_double(nll[i].log_weight_std);
      if (gaussian) csv << ',' << format_double(mse_map[i]) << ',' << format_double(mse_prior[i]);
      csv << '\n';
      tb += mean;
      tb_var += se * se;
      tkl += kl[i] / Rd;
      trec += recon[i] / Rd;
      tn += nll[i].value;
      tn_var += nll[i].std_error * nll[i].std_error;
      tess += nll[i].ess;
      tlw += nll[i].log_weight_std;
      tsteps += steps;
      tevents += events;
      tmap += mse_map[i] * static_cast<double>(steps);
      tprior += mse_prior[i] * static_cast<double>(steps);
    }
    const double nd = static_cast<double>(n);
    csv << "ALL," << tsteps << ',' << tevents << ',' << format_double(tb) << ',' << format_double(std::sqrt(tb_var))
        << ',' << format_double(tkl) << ',' << format_double(trec) << ',' << per(tb, tsteps) << ','
        << per(tb, tevents) << ',' << format_double(tn) << ',' << format_double(std::sqrt(tn_var)) << ','
        << per(tn, tsteps) << ',' << per(tn, tevents) << ',' << format_double(tess / nd) << ','
        << format_double(tlw / nd);
    // every sequence has the same width, so step weights give the entry mean
    if (gaussian) csv << ',' << per(tmap, tsteps) << ',' << per(tprior, tsteps);
    csv << '\n';

    if (opt.output.empty()) {
      out << csv.str();
    } else {
      write_text(opt.output, csv.str());
      out << "bound per step " << per(tb, tsteps) << ", importance nll per step " << per(tn, tsteps) << " over "
          << n << " sequences\n";
    }
    return int(kOk);
  });
}

int cmd_sample(const SampleOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.horizon < 0) throw ArgumentError("horizon must be non-negative, got " + std::to_string(opt.horizon));
    if (opt.count < 0) throw ArgumentError("count must be non-negative, got " + std::to_string(opt.count));
    if (opt.output.empty()) throw ArgumentError("an output path is required");
    const Checkpoint ck = load_checkpoint(opt.checkpoint);
    Dataset raw = load_for(ck, opt.prefix);
    if (opt.prefix_length) {
      if (*opt.prefix_length == 0) throw ArgumentError("prefix length must be positive");
      for (std::size_t i = 0; i < raw.size(); ++i) {
        auto& seq = raw.sequences[i];
        const std::size_t L = seq.shape()[0];
        if (*opt.prefix_length > L) {
          throw ArgumentError("prefix sequence " + raw.ids[i] + " has " + std::to_string(L) + " steps, fewer than " +
                              std::to_string(*opt.prefix_length));
        }
        Tensor cut({*opt.prefix_length, raw.channels});
        std::copy_n(seq.data().begin(), cut.size(), cut.data().begin());
        seq = std::move(cut);
      }
    }
    const auto count = static_cast<std::size_t>(opt.count);
    if (count > 0 && raw.empty()) throw ArgumentError("prefix file '" + opt.prefix.string() + "' holds no sequences");
    const Dataset ds = model_view(ck, raw, opt.prefix);

    Dataset samples;
    samples.kind = ck.kind;
    samples.channels = raw.channels;
    samples.channel_names = raw.channel_names;
    const std::uint64_t base = derive_seed(opt.seed, "sample");
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t p = i % ds.size();
      const SequenceBatch prefix = to_batch(ds, {p});
      const SequenceBatch g =
          destandardized(generate(ck.model, prefix, static_cast<std::size_t>(opt.horizon), stream_seed(base, i)),
                         ck.standardization);
      Tensor seq = g.sequence(0);
      // the prefix region is copied from the file, not round-tripped
      std::copy_n(raw.sequences[p].data().begin(), raw.sequences[p].size(), seq.data().begin());
      samples.sequences.push_back(std::move(seq));
      samples.ids.push_back("sample" + std::to_string(i));
    }
    if (count == 0) {
      write_text(opt.output, "");
    } else {
      save_dataset(opt.output, samples);
    }
    out << "wrote " << count << " sequences to " << opt.output.string() << '\n';
    return int(kOk);
  });
}

int cmd_impute(const ImputeOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.output_dir.empty()) throw ArgumentError("an output directory is required");
    const Checkpoint ck = load_checkpoint(opt.checkpoint);
    const Dataset raw = load_for(ck, opt.data);
    if (raw.empty()) throw ArgumentError("no sequences in '" + opt.data.string() + "'");
    const Dataset ds = model_view(ck, raw, opt.data);
    const CorruptionSpec cs{opt.start, opt.end, opt.channels, derive_seed(opt.seed, "corrupt")};

    Dataset corrupted = raw, imputed = raw;
    std::vector<double> imp_mse(ds.size()), noise_mse(ds.size());
    for (const auto& batch : ordered_batches(ds, 64)) {
      const SequenceBatch target = to_batch(raw, batch.indices);
      const SequenceBatch c = corrupt(batch.data, cs, batch.indices.front());
      const SequenceBatch y = impute(ck.model, c, cs);
      const SequenceBatch c_raw = destandardized(c, ck.standardization);
      const SequenceBatch y_raw = destandardized(y, ck.standardization);
      const auto wi = window_mse(y_raw, target, cs);
      const auto wn = window_mse(c_raw, target, cs);
      for (std::size_t b = 0; b < batch.indices.size(); ++b) {
        const std::size_t i = batch.indices[b];
        imp_mse[i] = wi[b];
        noise_mse[i] = wn[b];
        // only window entries change; everything else stays as read
        Tensor cs_seq = raw.sequences[i], ys_seq = raw.sequences[i];
        const auto cw = c_raw.sequence(b), yw = y_raw.sequence(b);
        for (std::size_t t = cs.start; t < cs.end; ++t)
          for (std::size_t k = 0; k < raw.channels; ++k) {
            if (!opt.channels.empty() && std::find(opt.channels.begin(), opt.channels.end(), k) == opt.channels.end())
              continue;
            cs_seq.at(t, k) = cw.at(t, k);
            ys_seq.at(t, k) = yw.at(t, k);
          }
        corrupted.sequences[i] = std::move(cs_seq);
        imputed.sequences[i] = std::move(ys_seq);
      }
    }

    fs::create_directories(opt.output_dir);
    fs::remove(opt.output_dir / "manifest.txt");
    const std::string ext = file_ext(raw.kind);
    save_dataset(opt.output_dir / ("corrupted" + ext), corrupted);
    save_dataset(opt.output_dir / ("imputed" + ext), imputed);
    std::ostringstream csv;
    csv << "seq_id,window_mse,noise_mse\n";
    double si = 0, sn = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      csv << raw.ids[i] << ',' << format_double(imp_mse[i]) << ',' << format_double(noise_mse[i]) << '\n';
      si += imp_mse[i];
      sn += noise_mse[i];
    }
    const double nd = static_cast<double>(ds.size());
    csv << "ALL," << format_double(si / nd) << ',' << format_double(sn / nd) << '\n';
    write_text(opt.output_dir / "mse.csv", csv.str());
    write_manifest(opt.output_dir, {"corrupted" + ext, "imputed" + ext, "mse.csv"});
    out << "window mse " << format_double(si / nd) << " (noise fill " << format_double(sn / nd) << ")\n";
    return int(kOk);
  });
}

int cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.output.empty()) throw ArgumentError("an output path is required");
    Dataset ds;
    if (opt.kind == "coupled") {
      ds = synth_coupled_binary(opt.count, opt.steps, opt.channels, opt.seed);
    } else if (opt.kind == "linear-gaussian") {
      ds = synth_linear_gaussian(opt.count, opt.steps, opt.seed, opt.linear);
    } else if (opt.kind == "sines") {
      ds = synth_sines(opt.count, opt.steps, opt.channels, opt.noise, opt.seed);
    } else {
      throw ArgumentError("unknown synthetic kind '" + opt.kind + "' (expected coupled, linear-gaussian or sines)");
    }
    if (opt.output.has_parent_path()) fs::create_directories(opt.output.parent_path());
    save_dataset(opt.output, ds);
    out << "wrote " << ds.size() << " sequences to " << opt.output.string() << '\n';
    if (ds.oracle.step_nll) out << "oracle nll per step " << format_double(*ds.oracle.step_nll) << '\n';
    if (ds.oracle.factorized_step_nll) {
      out << "factorised floor per step " << format_double(*ds.oracle.factorized_step_nll) << '\n';
    }
    if (!ds.oracle.sequence_nll.empty()) {
      std::ostringstream csv;
      csv << "seq_id,nll\n";
      for (std::size_t i = 0; i < ds.size(); ++i) csv << ds.ids[i] << ',' << format_double(ds.oracle.sequence_nll[i]) << '\n';
      fs::path oracle = opt.output;
      oracle.replace_extension(".oracle.csv");
      write_text(oracle, csv.str());
      out << "exact per-sequence nll in " << oracle.string() << '\n';
    }
    return int(kOk);
  });
}

}  // namespace storn::cli
