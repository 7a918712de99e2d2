#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "strokeid/framing.hpp"
#include "strokeid/ingest.hpp"
#include "strokeid/metrics.hpp"
#include "strokeid/net.hpp"
#include "strokeid/synth.hpp"

namespace strokeid {

enum class StrokeFilter { All, LongOnly };

std::string_view stroke_filter_name(StrokeFilter f);

struct ModelConfig {
  std::array<int, 3> hidden_dims{512, 256, 128};
  double dropout_rate = 0.5;
};

struct EvalConfig {
  std::vector<int> fusion_counts{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int max_groups_per_user = 200;
  std::uint64_t seed = 1;
};

// One declarative description of a run; every command reads the parts it
// needs. Loaded from JSON, overridable by CLI flags.
struct RunConfig {
  std::string data_path;
  std::string out_dir = "out";
  StrokeFilter stroke_filter = StrokeFilter::All;
  FramingConfig framing;
  ModelConfig model;
  TrainConfig train;
  EvalConfig eval;
  std::uint64_t split_seed = 1;
  SynthSpec synth;

  std::string checkpoint_file() const { return out_dir + "/checkpoint.txt"; }
  std::string training_report_file() const { return out_dir + "/training_report.txt"; }
  std::string eval_report_file() const { return out_dir + "/eval_report.txt"; }
  std::string det_file(int n) const {
    return out_dir + "/det_" + std::to_string(n) + ".csv";
  }

  void validate() const;  // throws ConfigError
};

// JSON text -> RunConfig (unknown keys rejected). load_config reads a file.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// One seed to rule every stage: split, training, evaluation, synthesis.
void apply_master_seed(RunConfig& config, std::uint64_t seed);

// Per-class weight vector aligned with the user table indices.
Vector class_weight_vector(const ClassWeightTable& table, const UserTable& users);

struct SynthOutcome {
  std::size_t records = 0;
  std::size_t strokes = 0;   // after length filtering
  std::size_t users = 0;
  std::string data_file;
};

// Generates a synthetic dataset and writes it to config.data_path.
SynthOutcome run_synth(const RunConfig& config);

struct TrainOutcome {
  TrainingReport report;
  std::size_t records = 0;
  std::size_t dropped_records = 0;
  std::size_t strokes_total = 0;    // after length filter, before class filter
  std::size_t strokes_kept = 0;     // after the stroke-class filter
  std::size_t users = 0;
  std::size_t train_windows = 0;
  std::size_t val_windows = 0;
  std::size_t skipped_strokes = 0;  // shorter than the window
  std::string checkpoint_file;
  std::string report_file;
};

// Full pipeline: parse -> segment -> filter (+stroke-class filter) -> split
// -> class weights -> fit normalizer on train -> window -> train -> save the
// best checkpoint and the training report.
TrainOutcome run_train(const RunConfig& config);

struct EvalOutcome {
  EvalReport report;
  std::size_t test_strokes = 0;
  std::size_t skipped_strokes = 0;
  std::vector<std::string> det_files;
  std::string report_file;
};

// Rebuilds the test split, scores it with a trained checkpoint, and writes
// the evaluation report plus one DET CSV per fusion count.
// checkpoint_path defaults to config.checkpoint_file().
EvalOutcome run_eval(const RunConfig& config, const std::string& checkpoint_path = "");

}  // namespace strokeid
