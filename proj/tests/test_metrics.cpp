#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "strokeid/errors.hpp"
#include "strokeid/metrics.hpp"
#include "strokeid/rng.hpp"

using namespace strokeid;

namespace {

TrialSet make_trials(const std::vector<double>& genuine, const std::vector<double>& impostor) {
  TrialSet set;
  for (double s : genuine) set.trials.push_back({0, s, true});
  for (double s : impostor) set.trials.push_back({1, s, false});
  return set;
}

TrialSet random_trials(Rng& rng, int count, bool quantized) {
  TrialSet set;
  for (int i = 0; i < count; ++i) {
    double score = rng.uniform();
    if (quantized) score = std::round(score * 10.0) / 10.0;  // force score ties
    set.trials.push_back({0, score, rng.below(2) == 0});
  }
  // the sweep needs at least one of each
  set.trials.push_back({0, rng.uniform(), true});
  set.trials.push_back({0, rng.uniform(), false});
  return set;
}

Probe make_probe(int true_user, std::initializer_list<double> scores) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(scores.size()));
  Eigen::Index i = 0;
  for (double s : scores) v[i++] = s;
  return {true_user, {v, ScoreSource::Stroke, 1}};
}

}  // namespace

TEST(ArgmaxLowest, TiesBreakToLowestIndex) {
  Eigen::VectorXd v(4);
  v << 0.2, 0.4, 0.4, 0.1;
  EXPECT_EQ(argmax_lowest(v), 1);
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(5, 0.2);
  EXPECT_EQ(argmax_lowest(uniform), 0);
}

TEST(Accuracy, DirectCounts) {
  EXPECT_DOUBLE_EQ(accuracy({make_probe(0, {0.9, 0.1}), make_probe(1, {0.2, 0.8})}), 1.0);
  EXPECT_DOUBLE_EQ(accuracy({make_probe(0, {0.9, 0.1}), make_probe(1, {0.7, 0.3})}), 0.5);
  EXPECT_THROW(accuracy({}), ConfigError);
}

TEST(Accuracy, MatchesRecountOracle) {
  Rng rng(1);
  std::vector<Probe> probes;
  const int k = 5;
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd v(k);
    for (int j = 0; j < k; ++j) v[j] = rng.uniform();
    v /= v.sum();
    probes.push_back({static_cast<int>(rng.below(k)), {v, ScoreSource::Stroke, 1}});
  }
  std::size_t correct = 0;
  for (const Probe& p : probes) {
    int best = 0;
    for (int j = 1; j < k; ++j)
      if (p.score.scores[j] > p.score.scores[best]) best = j;
    if (best == p.true_user) ++correct;
  }
  EXPECT_DOUBLE_EQ(accuracy(probes), static_cast<double>(correct) / 200.0);
}

TEST(Confusion, BoundaryThresholds) {
  Rng rng(2);
  const TrialSet set = random_trials(rng, 50, false);
  const ConfusionCounts at_zero = confusion_at_threshold(set, 0.0);
  EXPECT_EQ(at_zero.fn, 0);
  EXPECT_EQ(at_zero.tn, 0);
  const ConfusionCounts above_one = confusion_at_threshold(set, 1.1);
  EXPECT_EQ(above_one.tp, 0);
  EXPECT_EQ(above_one.fp, 0);
  EXPECT_EQ(at_zero.total(), static_cast<std::int64_t>(set.trials.size()));
}

TEST(Confusion, MatchesRecountAcrossThresholds) {
  Rng rng(3);
  const TrialSet set = random_trials(rng, 100, true);
  for (int i = 0; i <= 10; ++i) {
    const double t = i / 10.0;
    const ConfusionCounts c = confusion_at_threshold(set, t);
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (const Trial& trial : set.trials) {
      if (trial.genuine && trial.score >= t) ++tp;
      if (trial.genuine && trial.score < t) ++fn;
      if (!trial.genuine && trial.score >= t) ++fp;
      if (!trial.genuine && trial.score < t) ++tn;
    }
    EXPECT_EQ(c.tp, tp);
    EXPECT_EQ(c.fp, fp);
    EXPECT_EQ(c.tn, tn);
    EXPECT_EQ(c.fn, fn);
  }
}

TEST(Rates, FormulaEvaluation) {
  EXPECT_DOUBLE_EQ(far({0, 1, 3, 0}), 0.25);        // FP=1, TN=3
  EXPECT_DOUBLE_EQ(frr({5, 0, 0, 0}), 0.0);         // FN=0, TP=5
  EXPECT_DOUBLE_EQ(far({1, 1, 1, 1}), 0.5);
  EXPECT_DOUBLE_EQ(frr({1, 1, 1, 1}), 0.5);
  EXPECT_THROW(far({1, 0, 0, 1}), ConfigError);     // FP+TN == 0
  EXPECT_THROW(frr({0, 1, 1, 0}), ConfigError);     // FN+TP == 0
}

TEST(DetCurve, PerfectSeparationReachesZeroZero) {
  const TrialSet set = make_trials({0.8, 0.9, 0.95}, {0.1, 0.2, 0.3});
  const auto curve = det_curve(set);
  bool found = false;
  for (const DetPoint& p : curve)
    if (p.far == 0.0 && p.frr == 0.0) found = true;
  EXPECT_TRUE(found);
  EXPECT_DOUBLE_EQ(eer(curve), 0.0);
}

TEST(DetCurve, IdenticalScoresDegenerateToSentinels) {
  const TrialSet set = make_trials({0.5, 0.5}, {0.5, 0.5});
  const auto curve = det_curve(set);
  for (const DetPoint& p : curve) {
    const bool accept_all = p.far == 1.0 && p.frr == 0.0;
    const bool reject_all = p.far == 0.0 && p.frr == 1.0;
    EXPECT_TRUE(accept_all || reject_all);
  }
}

TEST(DetCurve, PointsMatchConfusionRecomputation) {
  Rng rng(4);
  const TrialSet set = random_trials(rng, 50, true);
  const auto curve = det_curve(set);
  for (const DetPoint& p : curve) {
    const ConfusionCounts c = confusion_at_threshold(set, p.threshold);
    EXPECT_DOUBLE_EQ(p.far, far(c));
    EXPECT_DOUBLE_EQ(p.frr, frr(c));
  }
}

TEST(DetCurve, MonotoneInThreshold) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const TrialSet set = random_trials(rng, 60, trial % 2 == 0);
    const auto curve = det_curve(set);
    for (std::size_t i = 1; i < curve.size(); ++i) {
      EXPECT_GT(curve[i].threshold, curve[i - 1].threshold);
      EXPECT_LE(curve[i].far, curve[i - 1].far);
      EXPECT_GE(curve[i].frr, curve[i - 1].frr);
    }
  }
}

TEST(DetCurve, RequiresBothTrialKinds) {
  EXPECT_THROW(det_curve(make_trials({0.5}, {})), ConfigError);
  EXPECT_THROW(det_curve(make_trials({}, {0.5})), ConfigError);
}

TEST(Eer, HandBuiltTrialSet) {
  // one genuine below and one impostor above the crossing -> EER 1/3
  const TrialSet set = make_trials({0.9, 0.8, 0.4}, {0.6, 0.3, 0.2});
  EXPECT_NEAR(eer(det_curve(set)), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(oracles::eer_by_sweep(set), 1.0 / 3.0, 1e-12);
}

TEST(Eer, MatchesSweepOracleOnRandomSets) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const TrialSet set = random_trials(rng, 2 + static_cast<int>(rng.below(98)), trial % 2 == 0);
    EXPECT_NEAR(eer(det_curve(set)), oracles::eer_by_sweep(set), 1e-9);
  }
}

TEST(Eer, SameDistributionScoresGiveHalf) {
  Rng rng(7);
  TrialSet set;
  for (int i = 0; i < 10000; ++i) set.trials.push_back({0, rng.uniform(), i % 2 == 0});
  EXPECT_NEAR(eer(det_curve(set)), 0.5, 0.05);
}

TEST(Eer, InvariantUnderMonotoneScoreTransform) {
  Rng rng(8);
  TrialSet set = random_trials(rng, 80, false);
  const double base = eer(det_curve(set));
  TrialSet cubed = set;
  for (Trial& t : cubed.trials) t.score = t.score * t.score * t.score;
  EXPECT_NEAR(eer(det_curve(cubed)), base, 1e-12);
}

TEST(ExportDet, HeaderPlusOneLinePerPoint) {
  const std::vector<DetPoint> curve = {{0.1, 1.0, 0.0}, {0.9, 0.0, 1.0}};
  std::ostringstream out;
  export_det(curve, out);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_EQ(text.rfind("threshold,far,frr\n", 0), 0u);
}

TEST(ExportDet, RoundTripParse) {
  Rng rng(9);
  const TrialSet set = random_trials(rng, 40, false);
  const auto curve = det_curve(set);
  std::ostringstream out;
  export_det(curve, out);

  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  std::vector<DetPoint> parsed;
  std::string line;
  while (std::getline(in, line)) {
    DetPoint p;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf", &p.threshold, &p.far, &p.frr), 3);
    parsed.push_back(p);
  }
  ASSERT_EQ(parsed.size(), curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    EXPECT_EQ(parsed[i].threshold, curve[i].threshold);  // %.17g round-trips exactly
    EXPECT_EQ(parsed[i].far, curve[i].far);
    EXPECT_EQ(parsed[i].frr, curve[i].frr);
  }
}

TEST(ExportReport, RowsAscendInFusionCount) {
  EvalReport report;
  report.stroke_filter = "all";
  for (int n = 1; n <= 10; ++n)
    report.entries.push_back({n, 0.9, 0.05, 100, 1000, "det_" + std::to_string(n) + ".csv"});
  std::ostringstream out;
  export_report(report, out);
  const std::string text = out.str();
  EXPECT_NE(text.find("stroke-class filter: all"), std::string::npos);
  EXPECT_NE(text.find("det_10.csv"), std::string::npos);
  // header + filter line + 10 data rows
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 12);
}
