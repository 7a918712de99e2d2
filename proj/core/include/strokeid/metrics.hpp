#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "strokeid/fusion.hpp"

namespace strokeid {

// First index attaining the maximum (deterministic tie break).
int argmax_lowest(const Eigen::VectorXd& v);

// Fraction of probes whose top-scoring user is the true user.
double accuracy(const std::vector<Probe>& fused);

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
};

// Accept iff score >= threshold.
ConfusionCounts confusion_at_threshold(const TrialSet& trials, double threshold);

double far(const ConfusionCounts& c);  // FP / (FP + TN)
double frr(const ConfusionCounts& c);  // FN / (FN + TP)

struct DetPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

// One point per unique trial score, plus sentinels below the minimum
// (accept everything) and above the maximum (reject everything). Along
// ascending thresholds far is non-increasing and frr non-decreasing.
// Requires at least one genuine and one impostor trial.
std::vector<DetPoint> det_curve(const TrialSet& trials);

// Error rate where FAR and FRR cross, linearly interpolated between the
// adjacent points where (far - frr) changes sign; an exact far == frr point
// is returned as-is. Depends only on the rank statistics of the scores.
double eer(const std::vector<DetPoint>& curve);

// CSV with header "threshold,far,frr", full decimal precision.
void export_det(const std::vector<DetPoint>& curve, std::ostream& out);

struct EvalEntry {
  int n_strokes = 1;
  double accuracy = 0.0;
  double eer = 0.0;
  std::size_t probes = 0;
  std::size_t trials = 0;
  std::string det_file;  // DET curve written for this fusion depth
};

struct EvalReport {
  std::string stroke_filter;  // "all" or "long"
  std::vector<EvalEntry> entries;
};

// Human-readable table: strokes fused vs accuracy and EER.
void export_report(const EvalReport& report, std::ostream& out);

}  // namespace strokeid
