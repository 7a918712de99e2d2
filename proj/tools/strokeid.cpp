// Command line driver for the stroke-identification pipeline.
//
//   strokeid synth --config run.json          generate a synthetic dataset
//   strokeid train --config run.json          train and checkpoint a model
//   strokeid eval  --config run.json          score the test split
//
// Flags override the config file. Exit codes: 0 success, 1 generic error,
// 2 I/O failure, 3 insufficient data (e.g. a user with fewer than 5 strokes),
// 4 training divergence, 5 checkpoint/config mismatch.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include "strokeid/errors.hpp"
#include "strokeid/pipeline.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::string> data;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strokes;
  std::optional<int> window;
  std::optional<std::vector<int>> fuse;
  std::string checkpoint;
};

strokeid::RunConfig make_config(const Flags& flags) {
  strokeid::RunConfig config;
  if (!flags.config_path.empty()) config = strokeid::load_config(flags.config_path);
  if (flags.data) config.data_path = *flags.data;
  if (flags.out) config.out_dir = *flags.out;
  if (flags.seed) strokeid::apply_master_seed(config, *flags.seed);
  if (flags.strokes) {
    if (*flags.strokes == "all")
      config.stroke_filter = strokeid::StrokeFilter::All;
    else if (*flags.strokes == "long")
      config.stroke_filter = strokeid::StrokeFilter::LongOnly;
    else
      throw strokeid::ConfigError("--strokes must be 'all' or 'long'");
  }
  if (flags.window) config.framing.window_size = *flags.window;
  if (flags.fuse) config.eval.fusion_counts = *flags.fuse;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"touchscreen stroke biometrics: synthesis, training, evaluation"};
  app.require_subcommand(1);

  Flags flags;
  app.add_option("--config", flags.config_path, "JSON run configuration");
  app.add_option("--data", flags.data, "touch-record CSV path (overrides config)");
  app.add_option("--out", flags.out, "output directory (overrides config)");
  app.add_option("--seed", flags.seed, "master seed for split/train/eval/synth");
  app.add_option("--strokes", flags.strokes, "stroke-class filter: all | long");
  app.add_option("--window", flags.window, "sliding window size W");
  app.add_option("--fuse", flags.fuse, "fusion counts, e.g. --fuse 1,2,5,10")
      ->delimiter(',');

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic touch-record CSV");
  CLI::App* train = app.add_subcommand("train", "run the full training pipeline");
  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
  eval->add_option("--checkpoint", flags.checkpoint,
                   "checkpoint file (default: <out>/checkpoint.txt)");
  for (CLI::App* sub : {synth, train, eval}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    const strokeid::RunConfig config = make_config(flags);
    if (synth->parsed()) {
      const strokeid::SynthOutcome outcome = strokeid::run_synth(config);
      std::printf("wrote %zu records (%zu usable strokes, %zu users) to %s\n", outcome.records,
                  outcome.strokes, outcome.users, outcome.data_file.c_str());
    } else if (train->parsed()) {
      const strokeid::TrainOutcome outcome = strokeid::run_train(config);
      std::printf("checkpoint: %s\nreport: %s\nbest epoch: %d\n",
                  outcome.checkpoint_file.c_str(), outcome.report_file.c_str(),
                  outcome.report.best_epoch);
    } else if (eval->parsed()) {
      const strokeid::EvalOutcome outcome = strokeid::run_eval(config, flags.checkpoint);
      for (const strokeid::EvalEntry& e : outcome.report.entries)
        std::printf("n=%d accuracy=%.4f eer=%.4f\n", e.n_strokes, e.accuracy, e.eer);
      std::printf("report: %s\n", outcome.report_file.c_str());
    }
  } catch (const strokeid::InsufficientDataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const strokeid::DivergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const strokeid::CheckpointError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 5;
  } catch (const strokeid::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
