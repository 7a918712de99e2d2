#include "strokeid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "strokeid/errors.hpp"
#include "strokeid/text.hpp"

namespace strokeid {

int argmax_lowest(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

double accuracy(const std::vector<Probe>& fused) {
  if (fused.empty()) throw ConfigError("accuracy of an empty probe list is undefined");
  std::size_t correct = 0;
  for (const Probe& p : fused)
    if (argmax_lowest(p.score.scores) == p.true_user) ++correct;
  return static_cast<double>(correct) / static_cast<double>(fused.size());
}

ConfusionCounts confusion_at_threshold(const TrialSet& trials, double threshold) {
  ConfusionCounts c;
  for (const Trial& t : trials.trials) {
    const bool accepted = t.score >= threshold;
    if (t.genuine)
      accepted ? ++c.tp : ++c.fn;
    else
      accepted ? ++c.fp : ++c.tn;
  }
  return c;
}

double far(const ConfusionCounts& c) {
  if (c.fp + c.tn == 0) throw ConfigError("FAR undefined: no impostor trials");
  return static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
}

double frr(const ConfusionCounts& c) {
  if (c.fn + c.tp == 0) throw ConfigError("FRR undefined: no genuine trials");
  return static_cast<double>(c.fn) / static_cast<double>(c.fn + c.tp);
}

std::vector<DetPoint> det_curve(const TrialSet& trials) {
  std::int64_t genuine_total = 0, impostor_total = 0;
  for (const Trial& t : trials.trials) (t.genuine ? genuine_total : impostor_total)++;
  if (genuine_total == 0 || impostor_total == 0)
    throw ConfigError("DET curve needs at least one genuine and one impostor trial");

  // Sorted (score, genuine) with suffix counts gives every confusion in one sweep.
  std::vector<std::pair<double, bool>> sorted;
  sorted.reserve(trials.trials.size());
  for (const Trial& t : trials.trials) sorted.emplace_back(t.score, t.genuine);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<DetPoint> curve;
  curve.push_back({sorted.front().first - 1.0, 1.0, 0.0});  // accept everything

  std::int64_t genuine_below = 0, impostor_below = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double threshold = sorted[i].first;
    // trials strictly below `threshold` are rejected; ties are accepted
    const auto fp = impostor_total - impostor_below;
    const auto fn = genuine_below;
    curve.push_back({threshold,
                     static_cast<double>(fp) / static_cast<double>(impostor_total),
                     static_cast<double>(fn) / static_cast<double>(genuine_total)});
    while (i < sorted.size() && sorted[i].first == threshold) {
      (sorted[i].second ? genuine_below : impostor_below)++;
      ++i;
    }
  }
  curve.push_back({sorted.back().first + 1.0, 0.0, 1.0});  // reject everything
  return curve;
}

double eer(const std::vector<DetPoint>& curve) {
  if (curve.empty()) throw ConfigError("EER of an empty DET curve is undefined");

  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double d = curve[i].far - curve[i].frr;
    if (d == 0.0) return curve[i].far;
    if (d < 0.0) {
      if (i == 0) return curve[i].far;  // degenerate: frr already above far
      // Interpolate between the sign change. The threshold scale cancels, so
      // the crossing depends only on the four rates.
      const double d_prev = curve[i - 1].far - curve[i - 1].frr;
      const double t = d_prev / (d_prev - d);  // in (0, 1)
      return curve[i - 1].far + t * (curve[i].far - curve[i - 1].far);
    }
  }
  return curve.back().far;  // far stayed above frr across the whole sweep
}

void export_det(const std::vector<DetPoint>& curve, std::ostream& out) {
  out << "threshold,far,frr\n";
  for (const DetPoint& p : curve)
    out << format_double(p.threshold) << ',' << format_double(p.far) << ','
        << format_double(p.frr) << '\n';
  if (!out) throw IoError("failed to write DET stream");
}

void export_report(const EvalReport& report, std::ostream& out) {
  out << "stroke-class filter: " << report.stroke_filter << '\n';
  char line[200];
  std::snprintf(line, sizeof(line), "%7s  %10s  %10s  %8s  %10s  %s\n", "strokes", "accuracy",
                "eer", "probes", "trials", "det");
  out << line;
  for (const EvalEntry& e : report.entries) {
    std::snprintf(line, sizeof(line), "%7d  %10.6f  %10.6f  %8zu  %10zu  %s\n", e.n_strokes,
                  e.accuracy, e.eer, e.probes, e.trials, e.det_file.c_str());
    out << line;
  }
  if (!out) throw IoError("failed to write report stream");
}

}  // namespace strokeid
