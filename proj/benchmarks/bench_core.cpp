#include <benchmark/benchmark.h>

#include "strokeid/fusion.hpp"
#include "strokeid/ingest.hpp"
#include "strokeid/metrics.hpp"
#include "strokeid/net.hpp"
#include "strokeid/synth.hpp"

using namespace strokeid;

namespace {

Matrix gaussian_batch(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.normal(0.0, 1.0);
  return m;
}

void BM_ForwardInfer(benchmark::State& state) {
  const MlpModel model = init_model(35, {256, 128, 64}, 41, 1);
  const Matrix batch = gaussian_batch(state.range(0), 35, 2);
  for (auto _ : state) {
    Matrix probs = forward_infer(model, batch);
    benchmark::DoNotOptimize(probs);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardInfer)->Arg(128)->Arg(1024)->Arg(4096);

void BM_LossAndGrad(benchmark::State& state) {
  MlpModel model = init_model(35, {256, 128, 64}, 41, 1);
  const Matrix batch = gaussian_batch(state.range(0), 35, 3);
  std::vector<int> labels(static_cast<std::size_t>(state.range(0)));
  Rng rng(4);
  for (auto& l : labels) l = static_cast<int>(rng.below(41));
  const Vector weights = Vector::Ones(41);
  for (auto _ : state) {
    LossGrad lg = loss_and_grad(model, batch, labels, weights, rng);
    benchmark::DoNotOptimize(lg.loss);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LossAndGrad)->Arg(128)->Arg(512);

void BM_SegmentStrokes(benchmark::State& state) {
  SynthSpec spec;
  spec.num_users = 8;
  spec.strokes_per_user = 250;
  const std::vector<TouchRecord> records = generate(spec);
  for (auto _ : state) {
    SegmentationResult r = segment_strokes(records);
    benchmark::DoNotOptimize(r.strokes.size());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(records.size()));
}
BENCHMARK(BM_SegmentStrokes);

void BM_MakeWindows(benchmark::State& state) {
  SynthSpec spec;
  spec.num_users = 2;
  spec.strokes_per_user = 10;
  spec.min_length = 60;
  spec.max_length = 60;
  auto seg = segment_strokes(generate(spec));
  const Stroke stroke = seg.strokes.front();
  FramingConfig config;
  NormalizationStats stats;
  stats.mean.assign(config.attributes.size(), 0.0);
  stats.stddev.assign(config.attributes.size(), 1.0);
  for (auto _ : state) {
    auto frames = make_windows(stroke, config, stats, 0, 0);
    benchmark::DoNotOptimize(frames.size());
  }
}
BENCHMARK(BM_MakeWindows);

void BM_FuseWindows(benchmark::State& state) {
  Rng rng(5);
  std::vector<ScoreVector> windows;
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd v(41);
    for (int j = 0; j < 41; ++j) v[j] = 1e-9 + rng.uniform();
    v /= v.sum();
    windows.push_back({v, ScoreSource::Window, 1});
  }
  for (auto _ : state) {
    ScoreVector fused = fuse_windows(windows);
    benchmark::DoNotOptimize(fused.scores);
  }
}
BENCHMARK(BM_FuseWindows);

void BM_DetCurveAndEer(benchmark::State& state) {
  Rng rng(6);
  TrialSet set;
  for (int i = 0; i < state.range(0); ++i)
    set.trials.push_back({0, rng.uniform(), rng.below(41) == 0});
  set.trials.push_back({0, rng.uniform(), true});
  set.trials.push_back({0, rng.uniform(), false});
  for (auto _ : state) {
    const auto curve = det_curve(set);
    benchmark::DoNotOptimize(eer(curve));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DetCurveAndEer)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
