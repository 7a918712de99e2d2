#include "strokeid/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "strokeid/log.hpp"
#include "strokeid/rng.hpp"
#include "strokeid/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace strokeid {

namespace {

constexpr std::uint64_t kEvalStream = 0x6576616c;

void check_known_keys(const json& j, std::initializer_list<const char*> known,
                      const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }) == known.end())
      throw ConfigError("unknown config key '" + key + "' in " + where);
  }
}

std::vector<Attribute> attributes_from_json(const json& arr) {
  std::vector<Attribute> attrs;
  for (const auto& name : arr) {
    const auto a = attribute_from_name(name.get<std::string>());
    if (!a) throw ConfigError("unknown attribute '" + name.get<std::string>() + "' in config");
    attrs.push_back(*a);
  }
  return attrs;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

std::vector<TouchRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file '" + path + "'");
  return parse_csv(in);
}

std::vector<Stroke> apply_stroke_filter(std::vector<Stroke> strokes, StrokeFilter filter) {
  if (filter == StrokeFilter::All) return strokes;
  std::vector<Stroke> kept;
  for (Stroke& s : strokes)
    if (s.category == StrokeCategory::Long) kept.push_back(std::move(s));
  return kept;
}

struct PreparedData {
  std::size_t records = 0;
  std::size_t dropped_records = 0;
  std::size_t strokes_total = 0;  // post length filter
  std::vector<Stroke> strokes;    // post stroke-class filter
  UserTable users;
};

PreparedData prepare(const RunConfig& config) {
  PreparedData data;
  std::vector<TouchRecord> records = read_records(config.data_path);
  data.records = records.size();

  SegmentationResult seg = segment_strokes(std::move(records));
  data.dropped_records = seg.dropped_records;

  std::vector<Stroke> filtered = filter_and_classify(std::move(seg.strokes));
  data.strokes_total = filtered.size();
  data.strokes = apply_stroke_filter(std::move(filtered), config.stroke_filter);
  if (data.strokes.empty())
    throw InsufficientDataError(-1, "no strokes survive the '" +
                                        std::string(stroke_filter_name(config.stroke_filter)) +
                                        "' stroke-class filter");
  data.users = UserTable::from_strokes(data.strokes);
  return data;
}

}  // namespace

std::string_view stroke_filter_name(StrokeFilter f) {
  return f == StrokeFilter::All ? "all" : "long";
}

void RunConfig::validate() const {
  framing.validate();
  train.validate();
  synth.validate();
  if (model.dropout_rate < 0 || model.dropout_rate >= 1)
    throw ConfigError("dropout rate must be in [0, 1)");
  for (int h : model.hidden_dims)
    if (h < 1) throw ConfigError("hidden layer sizes must be positive");
  if (eval.fusion_counts.empty()) throw ConfigError("fusion count list must not be empty");
  int prev = 0;
  for (int n : eval.fusion_counts) {
    if (n <= prev) throw ConfigError("fusion counts must be ascending positive integers");
    prev = n;
  }
  if (eval.max_groups_per_user < 1)
    throw ConfigError("max groups per user must be at least 1");
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig c;
  try {
    check_known_keys(j, {"data", "out", "strokes", "framing", "model", "train", "split",
                         "eval", "synth"},
                     "top level");
    if (j.contains("data")) c.data_path = j["data"].get<std::string>();
    if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
    if (j.contains("strokes")) {
      const auto s = j["strokes"].get<std::string>();
      if (s == "all")
        c.stroke_filter = StrokeFilter::All;
      else if (s == "long")
        c.stroke_filter = StrokeFilter::LongOnly;
      else
        throw ConfigError("strokes filter must be 'all' or 'long', got '" + s + "'");
    }
    if (j.contains("framing")) {
      const json& f = j["framing"];
      check_known_keys(f, {"window", "stride", "attributes"}, "framing");
      if (f.contains("window")) c.framing.window_size = f["window"].get<int>();
      if (f.contains("stride")) c.framing.stride = f["stride"].get<int>();
      if (f.contains("attributes")) c.framing.attributes = attributes_from_json(f["attributes"]);
    }
    if (j.contains("model")) {
      const json& m = j["model"];
      check_known_keys(m, {"hidden", "dropout"}, "model");
      if (m.contains("hidden")) {
        const auto dims = m["hidden"].get<std::vector<int>>();
        if (dims.size() != 3) throw ConfigError("model.hidden must list exactly 3 layer sizes");
        std::copy(dims.begin(), dims.end(), c.model.hidden_dims.begin());
      }
      if (m.contains("dropout")) c.model.dropout_rate = m["dropout"].get<double>();
    }
    if (j.contains("train")) {
      const json& t = j["train"];
      check_known_keys(t, {"learning_rate", "epochs", "batch_size", "seed", "bn_momentum",
                           "bn_epsilon"},
                       "train");
      if (t.contains("learning_rate")) c.train.learning_rate = t["learning_rate"].get<double>();
      if (t.contains("epochs")) c.train.epochs = t["epochs"].get<int>();
      if (t.contains("batch_size")) c.train.batch_size = t["batch_size"].get<int>();
      if (t.contains("seed")) c.train.seed = t["seed"].get<std::uint64_t>();
      if (t.contains("bn_momentum")) c.train.bn_momentum = t["bn_momentum"].get<double>();
      if (t.contains("bn_epsilon")) c.train.bn_epsilon = t["bn_epsilon"].get<double>();
    }
    if (j.contains("split")) {
      const json& s = j["split"];
      check_known_keys(s, {"seed"}, "split");
      if (s.contains("seed")) c.split_seed = s["seed"].get<std::uint64_t>();
    }
    if (j.contains("eval")) {
      const json& e = j["eval"];
      check_known_keys(e, {"fuse", "max_groups_per_user", "seed"}, "eval");
      if (e.contains("fuse")) c.eval.fusion_counts = e["fuse"].get<std::vector<int>>();
      if (e.contains("max_groups_per_user"))
        c.eval.max_groups_per_user = e["max_groups_per_user"].get<int>();
      if (e.contains("seed")) c.eval.seed = e["seed"].get<std::uint64_t>();
    }
    if (j.contains("synth")) {
      const json& s = j["synth"];
      check_known_keys(s, {"users", "strokes_per_user", "min_length", "max_length",
                           "separability", "seed"},
                       "synth");
      if (s.contains("users")) c.synth.num_users = s["users"].get<int>();
      if (s.contains("strokes_per_user"))
        c.synth.strokes_per_user = s["strokes_per_user"].get<int>();
      if (s.contains("min_length")) c.synth.min_length = s["min_length"].get<int>();
      if (s.contains("max_length")) c.synth.max_length = s["max_length"].get<int>();
      if (s.contains("separability")) c.synth.separability = s["separability"].get<double>();
      if (s.contains("seed")) c.synth.seed = s["seed"].get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_master_seed(RunConfig& config, std::uint64_t seed) {
  config.split_seed = seed;
  config.train.seed = seed;
  config.eval.seed = seed;
  config.synth.seed = seed;
}

Vector class_weight_vector(const ClassWeightTable& table, const UserTable& users) {
  Vector weights(users.size());
  for (int i = 0; i < users.size(); ++i) weights[i] = table.at(users.id_at(i));
  return weights;
}

SynthOutcome run_synth(const RunConfig& config) {
  config.synth.validate();
  if (config.data_path.empty()) throw ConfigError("synth needs a data path to write to");

  const std::vector<TouchRecord> records = generate(config.synth);

  const fs::path parent = fs::path(config.data_path).parent_path();
  if (!parent.empty()) ensure_out_dir(parent.string());
  std::ofstream out = open_output(config.data_path);
  write_csv(records, out);
  out.close();
  if (!out) throw IoError("failed writing '" + config.data_path + "'");

  // Re-run the ingest path so the printed counts describe usable strokes.
  SegmentationResult seg = segment_strokes(records);
  const std::vector<Stroke> kept = filter_and_classify(std::move(seg.strokes));

  SynthOutcome outcome;
  outcome.records = records.size();
  outcome.strokes = kept.size();
  outcome.users = UserTable::from_strokes(kept).ids().size();
  outcome.data_file = config.data_path;
  log_info("synth: wrote " + std::to_string(outcome.records) + " records, " +
           std::to_string(outcome.strokes) + " usable strokes, " +
           std::to_string(outcome.users) + " users -> " + config.data_path);
  return outcome;
}

TrainOutcome run_train(const RunConfig& config) {
  config.validate();
  ensure_out_dir(config.out_dir);

  PreparedData data = prepare(config);
  log_info("train: " + std::to_string(data.records) + " records -> " +
           std::to_string(data.strokes.size()) + " strokes (" +
           std::to_string(data.dropped_records) + " records dropped)");

  DatasetSplit split = split_dataset(std::move(data.strokes), SplitRatios{}, config.split_seed);
  const ClassWeightTable table = compute_class_weights(split.train, data.users);
  const Vector weights = class_weight_vector(table, data.users);

  const NormalizationStats stats = fit_normalizer(split.train, config.framing);
  const FrameSet train_frames = frame_strokes(split.train, config.framing, stats, data.users);
  const FrameSet val_frames = frame_strokes(split.val, config.framing, stats, data.users);
  if (train_frames.rows() == 0 || val_frames.rows() == 0)
    throw InsufficientDataError(-1, "no frames left after windowing; window too large?");

  MlpModel model = init_model(config.framing.input_dim(), config.model.hidden_dims,
                              data.users.size(), config.train.seed, config.model.dropout_rate,
                              config.train.bn_epsilon, config.train.bn_momentum);
  log_info("train: " + std::to_string(train_frames.rows()) + " train windows, " +
           std::to_string(val_frames.rows()) + " val windows, " +
           std::to_string(data.users.size()) + " users, input dim " +
           std::to_string(config.framing.input_dim()));

  TrainOutcome outcome;
  outcome.report = train(model, train_frames, val_frames, config.train, weights);
  outcome.records = data.records;
  outcome.dropped_records = data.dropped_records;
  outcome.strokes_total = data.strokes_total;
  outcome.strokes_kept = split.train.size() + split.val.size() + split.test.size();
  outcome.users = static_cast<std::size_t>(data.users.size());
  outcome.train_windows = static_cast<std::size_t>(train_frames.rows());
  outcome.val_windows = static_cast<std::size_t>(val_frames.rows());
  outcome.skipped_strokes = train_frames.skipped_strokes + val_frames.skipped_strokes;

  Checkpoint ckpt{std::move(model), stats, config.framing, data.users.ids()};
  outcome.checkpoint_file = config.checkpoint_file();
  {
    std::ofstream out = open_output(outcome.checkpoint_file);
    save_checkpoint(ckpt, out);
    if (!out) throw IoError("failed writing '" + outcome.checkpoint_file + "'");
  }

  outcome.report_file = config.training_report_file();
  {
    std::ofstream out = open_output(outcome.report_file);
    out << "strokeid training report\n";
    out << "data: " << config.data_path << '\n';
    out << "stroke-class filter: " << stroke_filter_name(config.stroke_filter) << '\n';
    out << "records: " << outcome.records << '\n';
    out << "dropped records: " << outcome.dropped_records << '\n';
    out << "strokes after length filter: " << outcome.strokes_total << '\n';
    out << "strokes after class filter: " << outcome.strokes_kept << '\n';
    out << "users: " << outcome.users << '\n';
    out << "split: train " << split.train.size() << ", val " << split.val.size() << ", test "
        << split.test.size() << " (seed " << config.split_seed << ")\n";
    out << "windows: train " << outcome.train_windows << ", val " << outcome.val_windows
        << " (skipped strokes: " << outcome.skipped_strokes << ")\n";
    out << "best epoch: " << outcome.report.best_epoch << '\n';
    char line[120];
    std::snprintf(line, sizeof(line), "%5s  %12s  %12s  %12s\n", "epoch", "train_loss",
                  "val_loss", "val_accuracy");
    out << line;
    for (std::size_t e = 0; e < outcome.report.train_loss.size(); ++e) {
      std::snprintf(line, sizeof(line), "%5zu  %12.6f  %12.6f  %12.6f\n", e,
                    outcome.report.train_loss[e], outcome.report.val_loss[e],
                    outcome.report.val_accuracy[e]);
      out << line;
    }
    if (!out) throw IoError("failed writing '" + outcome.report_file + "'");
  }

  log_info("train: best epoch " + std::to_string(outcome.report.best_epoch) +
           ", val accuracy " +
           format_double(outcome.report.val_accuracy[static_cast<std::size_t>(
               outcome.report.best_epoch)]));
  return outcome;
}

EvalOutcome run_eval(const RunConfig& config, const std::string& checkpoint_path) {
  config.validate();
  ensure_out_dir(config.out_dir);

  const std::string ckpt_path =
      checkpoint_path.empty() ? config.checkpoint_file() : checkpoint_path;
  std::ifstream ckpt_in(ckpt_path);
  if (!ckpt_in) throw IoError("cannot open checkpoint '" + ckpt_path + "'");
  const Checkpoint ckpt = load_checkpoint(ckpt_in);

  if (ckpt.framing != config.framing)
    throw CheckpointError(
        "checkpoint framing (attributes/window/stride) does not match the run config");

  PreparedData data = prepare(config);
  if (data.users.ids() != ckpt.user_ids)
    throw CheckpointError("user roster in '" + config.data_path +
                          "' does not match the checkpoint");

  DatasetSplit split = split_dataset(std::move(data.strokes), SplitRatios{}, config.split_seed);

  EvalOutcome outcome;
  outcome.test_strokes = split.test.size();

  // Stroke-level scores: fuse every window of each test stroke.
  std::vector<Probe> stroke_scores;
  std::map<int, std::vector<int>> by_user;
  for (const Stroke& stroke : split.test) {
    const int user = data.users.index_of(stroke.user_id);
    const std::vector<WindowFrame> frames =
        make_windows(stroke, ckpt.framing, ckpt.stats, user, 0);
    if (frames.empty()) {
      ++outcome.skipped_strokes;
      continue;
    }
    Matrix batch(static_cast<Eigen::Index>(frames.size()), ckpt.framing.input_dim());
    for (std::size_t i = 0; i < frames.size(); ++i)
      batch.row(static_cast<Eigen::Index>(i)) = frames[i].values.transpose();
    const Matrix probs = forward_infer(ckpt.model, batch);

    std::vector<ScoreVector> windows;
    windows.reserve(frames.size());
    for (Eigen::Index i = 0; i < probs.rows(); ++i)
      windows.push_back({probs.row(i).transpose(), ScoreSource::Window, 1});
    by_user[user].push_back(static_cast<int>(stroke_scores.size()));
    stroke_scores.push_back({user, fuse_windows(windows)});
  }
  if (stroke_scores.empty()) throw InsufficientDataError(-1, "no test strokes to evaluate");

  for (int n : config.eval.fusion_counts) {
    const GroupSample sample = sample_fusion_groups(
        by_user, n, config.eval.max_groups_per_user,
        combine_seed(config.eval.seed, combine_seed(kEvalStream, static_cast<std::uint64_t>(n))));
    if (sample.groups.empty())
      throw InsufficientDataError(
          -1, "no user has " + std::to_string(n) + " test strokes to fuse");

    std::vector<Probe> probes;
    probes.reserve(sample.groups.size());
    for (const FusionGroup& group : sample.groups) {
      std::vector<ScoreVector> members;
      members.reserve(group.members.size());
      for (int idx : group.members)
        members.push_back(stroke_scores[static_cast<std::size_t>(idx)].score);
      probes.push_back({group.user, fuse_strokes(members, n)});
    }

    const TrialSet trials = build_verification_trials(probes);
    const std::vector<DetPoint> curve = det_curve(trials);

    EvalEntry entry;
    entry.n_strokes = n;
    entry.accuracy = accuracy(probes);
    entry.eer = eer(curve);
    entry.probes = probes.size();
    entry.trials = trials.trials.size();
    entry.det_file = "det_" + std::to_string(n) + ".csv";
    outcome.report.entries.push_back(entry);

    const std::string det_path = config.det_file(n);
    std::ofstream det_out = open_output(det_path);
    export_det(curve, det_out);
    if (!det_out) throw IoError("failed writing '" + det_path + "'");
    outcome.det_files.push_back(det_path);

    log_info("eval: n=" + std::to_string(n) + " accuracy " + format_double(entry.accuracy) +
             " eer " + format_double(entry.eer) + " (" + std::to_string(entry.probes) +
             " probes)");
  }

  outcome.report.stroke_filter = std::string(stroke_filter_name(config.stroke_filter));
  outcome.report_file = config.eval_report_file();
  std::ofstream report_out = open_output(outcome.report_file);
  export_report(outcome.report, report_out);
  if (!report_out) throw IoError("failed writing '" + outcome.report_file + "'");
  return outcome;
}

}  // namespace strokeid
