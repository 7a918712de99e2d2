#include "strokeid/fusion.hpp"

#include <cmath>
#include <string>

#include "strokeid/errors.hpp"
#include "strokeid/rng.hpp"

namespace strokeid {

namespace {

constexpr double kLogFloor = 1e-12;

// Mean of log-posteriors, exponentiated and renormalized. Equivalent to the
// normalized geometric mean but stable for near-zero posteriors.
Eigen::VectorXd geometric_mean(const std::vector<ScoreVector>& inputs) {
  const Eigen::Index k = inputs.front().scores.size();
  Eigen::VectorXd log_mean = Eigen::VectorXd::Zero(k);
  for (const ScoreVector& sv : inputs) {
    if (sv.scores.size() != k) throw ConfigError("score vectors of mixed lengths in fusion");
    log_mean += sv.scores.cwiseMax(kLogFloor).array().log().matrix();
  }
  log_mean /= static_cast<double>(inputs.size());
  Eigen::VectorXd fused = (log_mean.array() - log_mean.maxCoeff()).exp().matrix();
  fused /= fused.sum();
  return fused;
}

}  // namespace

ScoreVector fuse_windows(const std::vector<ScoreVector>& window_scores) {
  if (window_scores.empty()) throw ConfigError("cannot fuse an empty window score list");
  ScoreVector out;
  out.scores = geometric_mean(window_scores);
  out.source = ScoreSource::Stroke;
  out.fused_count = 1;
  return out;
}

ScoreVector fuse_strokes(const std::vector<ScoreVector>& stroke_scores, int n) {
  if (static_cast<int>(stroke_scores.size()) != n)
    throw ConfigError("stroke fusion expected " + std::to_string(n) + " score vectors, got " +
                      std::to_string(stroke_scores.size()));
  ScoreVector out;
  out.scores = geometric_mean(stroke_scores);
  out.source = ScoreSource::Fused;
  out.fused_count = n;
  return out;
}

GroupSample sample_fusion_groups(const std::map<int, std::vector<int>>& strokes_by_user, int n,
                                 int max_groups_per_user, std::uint64_t seed) {
  if (n < 1) throw ConfigError("fusion group size must be at least 1");
  if (max_groups_per_user < 1) throw ConfigError("max groups per user must be at least 1");

  GroupSample sample;
  for (const auto& [user, stroke_ids] : strokes_by_user) {
    if (static_cast<int>(stroke_ids.size()) < n) {
      ++sample.skipped_users;
      continue;
    }
    std::vector<int> shuffled = stroke_ids;
    Rng rng(combine_seed(seed, static_cast<std::uint64_t>(user)));
    rng.shuffle(shuffled);

    const int available = static_cast<int>(shuffled.size()) / n;
    const int groups = std::min(available, max_groups_per_user);
    for (int g = 0; g < groups; ++g) {
      FusionGroup group;
      group.user = user;
      group.members.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(g) * n,
                           shuffled.begin() + static_cast<std::ptrdiff_t>(g + 1) * n);
      sample.groups.push_back(std::move(group));
    }
  }
  return sample;
}

TrialSet build_verification_trials(const std::vector<Probe>& fused) {
  if (fused.empty()) throw ConfigError("cannot build trials from an empty probe list");

  TrialSet set;
  set.n_strokes = fused.front().score.fused_count;
  for (const Probe& probe : fused) {
    const Eigen::Index k = probe.score.scores.size();
    for (Eigen::Index u = 0; u < k; ++u)
      set.trials.push_back({static_cast<int>(u), probe.score.scores[u],
                            static_cast<int>(u) == probe.true_user});
  }
  return set;
}

}  // namespace strokeid
