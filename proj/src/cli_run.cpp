#include <iostream>

#include "CLI11.hpp"
#include "storn/cli.hpp"

namespace storn::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic recurrent network training and evaluation", "storn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "storn 0.1.0");

  TrainOptions train;
  auto* t = app.add_subcommand("train", "train a model from a JSON run config");
  t->add_option("config", train.config, "run config")->required();
  t->add_flag("-q,--quiet", train.quiet, "no per-epoch progress");

  EvalOptions eval;
  auto* e = app.add_subcommand("eval", "bound and importance-sampled NLL per sequence");
  e->add_option("--checkpoint", eval.checkpoint)->required();
  e->add_option("--data", eval.data)->required();
  e->add_option("-o,--output", eval.output, "CSV path (stdout when omitted)");
  e->add_option("-S,--samples", eval.samples, "importance samples per sequence")->capture_default_str();
  e->add_option("--bound-samples", eval.bound_samples, "noise draws averaged for the bound")->capture_default_str();
  e->add_option("--seed", eval.seed)->capture_default_str();
  std::string split_path;
  e->add_option("--split", split_path, "split manifest written by train");
  e->add_option("--part", eval.part, "train, validation or test")->capture_default_str();

  SampleOptions sample;
  auto* s = app.add_subcommand("sample", "continue prefix sequences");
  s->add_option("--checkpoint", sample.checkpoint)->required();
  s->add_option("--prefix", sample.prefix, "prefix sequences in the checkpoint's data format")->required();
  s->add_option("-o,--output", sample.output)->required();
  s->add_option("--horizon", sample.horizon, "steps generated after the prefix")->required();
  s->add_option("--count", sample.count)->capture_default_str();
  std::size_t prefix_length = 0;
  auto* pl = s->add_option("--prefix-length", prefix_length, "use only the first steps of each prefix");
  s->add_option("--seed", sample.seed)->capture_default_str();

  ImputeOptions impute;
  auto* i = app.add_subcommand("impute", "corrupt a window with noise and reconstruct it");
  i->add_option("--checkpoint", impute.checkpoint)->required();
  i->add_option("--data", impute.data)->required();
  i->add_option("-o,--output-dir", impute.output_dir)->required();
  i->add_option("--start", impute.start, "first corrupted step")->required();
  i->add_option("--end", impute.end, "one past the last corrupted step")->required();
  i->add_option("--channels", impute.channels, "corrupted channels (default all)")->delimiter(',');
  i->add_option("--seed", impute.seed)->capture_default_str();

  SynthOptions synth;
  auto* y = app.add_subcommand("synth", "write a synthetic dataset");
  y->add_option("kind", synth.kind, "coupled, linear-gaussian or sines")->required();
  y->add_option("-o,--output", synth.output)->required();
  y->add_option("-n,--count", synth.count)->capture_default_str();
  y->add_option("--steps", synth.steps)->capture_default_str();
  y->add_option("--channels", synth.channels)->capture_default_str();
  y->add_option("--noise", synth.noise, "sines observation noise")->capture_default_str();
  y->add_option("--seed", synth.seed)->capture_default_str();
  y->add_option("--w-in", synth.linear.w_in)->capture_default_str();
  y->add_option("--w-rec", synth.linear.w_rec)->capture_default_str();
  y->add_option("--w-out", synth.linear.w_out)->capture_default_str();
  y->add_option("--w-lat", synth.linear.w_lat)->capture_default_str();
  y->add_option("--b-hid", synth.linear.b_hid)->capture_default_str();
  y->add_option("--b-out", synth.linear.b_out)->capture_default_str();
  y->add_option("--sigma-out", synth.linear.sigma_out)->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? int(kOk) : int(kUsage);
  }

  if (*t) return cmd_train(train, out, err);
  if (*e) {
    if (!split_path.empty()) eval.split = split_path;
    return cmd_eval(eval, out, err);
  }
  if (*s) {
    if (pl->count()) sample.prefix_length = prefix_length;
    return cmd_sample(sample, out, err);
  }
  if (*i) return cmd_impute(impute, out, err);
  return cmd_synth(synth, out, err);
}

}  // namespace storn::cli
