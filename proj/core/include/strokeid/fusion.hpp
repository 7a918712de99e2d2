#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

namespace strokeid {

enum class ScoreSource { Window, Stroke, Fused };

// A point on the K-user probability simplex plus its provenance.
struct ScoreVector {
  Eigen::VectorXd scores;
  ScoreSource source = ScoreSource::Window;
  int fused_count = 1;  // number of strokes behind a Fused vector
};

// Normalized geometric mean: per user u, exp(mean_i log max(p_i[u], 1e-12)),
// renormalized to sum 1. Permutation-invariant in the input list.
// Throws ConfigError on an empty list.
ScoreVector fuse_windows(const std::vector<ScoreVector>& window_scores);

// Same combination rule over stroke-level vectors; the list size must equal n.
ScoreVector fuse_strokes(const std::vector<ScoreVector>& stroke_scores, int n);

struct FusionGroup {
  int user = -1;             // true user index shared by all members
  std::vector<int> members;  // stroke-score indices, disjoint across groups
};

struct GroupSample {
  std::vector<FusionGroup> groups;
  std::size_t skipped_users = 0;  // users with fewer than n strokes
};

// Per user: seeded shuffle, then disjoint groups of n, capped at
// max_groups_per_user. Deterministic per seed.
GroupSample sample_fusion_groups(const std::map<int, std::vector<int>>& strokes_by_user,
                                 int n, int max_groups_per_user, std::uint64_t seed);

// A fused identification score labeled with the identity that produced it.
struct Probe {
  int true_user = -1;
  ScoreVector score;
};

struct Trial {
  int claimed_user = -1;
  double score = 0.0;
  bool genuine = false;
};

struct TrialSet {
  std::vector<Trial> trials;
  int n_strokes = 1;  // fusion depth the probes were built at
};

// For each probe with true user y and scores p, emits K verification trials
// (u, p[u], u == y): the claimed-identity posterior serves as the
// verification score. Exactly one genuine trial per probe.
TrialSet build_verification_trials(const std::vector<Probe>& fused);

}  // namespace strokeid
