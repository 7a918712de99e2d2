#include <gtest/gtest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "strokeid/errors.hpp"
#include "strokeid/framing.hpp"
#include "strokeid/rng.hpp"

using namespace strokeid;

namespace {

Stroke random_stroke(std::int64_t user, int length, Rng& rng) {
  Stroke s = helpers::stroke_of_length(user, length);
  for (auto& r : s.records) {
    r.x = rng.uniform(0.0, 1000.0);
    r.y = rng.uniform(0.0, 1600.0);
    r.pressure = rng.uniform(0.0, 1.0);
    r.area = rng.uniform(0.0, 0.5);
    r.finger_orientation = rng.normal(0.0, 1.0);
    r.phone_orientation = static_cast<std::int64_t>(rng.below(2));
  }
  return s;
}

NormalizationStats identity_stats(const FramingConfig& config) {
  NormalizationStats stats;
  stats.mean.assign(config.attributes.size(), 0.0);
  stats.stddev.assign(config.attributes.size(), 1.0);
  return stats;
}

}  // namespace

TEST(FramingConfig, Validation) {
  FramingConfig ok;
  EXPECT_NO_THROW(ok.validate());
  EXPECT_EQ(ok.input_dim(), 35);  // 7 attributes x W=5

  FramingConfig bad_w;
  bad_w.window_size = 1;
  EXPECT_THROW(bad_w.validate(), ConfigError);

  FramingConfig bad_stride;
  bad_stride.stride = 0;
  EXPECT_THROW(bad_stride.validate(), ConfigError);

  FramingConfig empty;
  empty.attributes.clear();
  EXPECT_THROW(empty.validate(), ConfigError);

  FramingConfig dup;
  dup.attributes = {Attribute::X, Attribute::X};
  EXPECT_THROW(dup.validate(), ConfigError);
}

TEST(AttributeNames, RoundTrip) {
  for (Attribute a : default_attributes()) {
    const auto back = attribute_from_name(attribute_name(a));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, a);
  }
  EXPECT_FALSE(attribute_from_name("timestamp").has_value());
  EXPECT_FALSE(attribute_from_name("user_id").has_value());
}

TEST(FitNormalizer, ConstantAttributeHasZeroStd) {
  const std::vector<Stroke> train = {helpers::stroke_of_length(1, 8)};
  FramingConfig config;
  const auto stats = fit_normalizer(train, config);
  const auto p = static_cast<std::size_t>(Attribute::Pressure);
  EXPECT_DOUBLE_EQ(stats.mean[p], 0.5);
  EXPECT_DOUBLE_EQ(stats.stddev[p], 0.0);
  EXPECT_DOUBLE_EQ(stats.divisor(p), 1.0);
}

TEST(FitNormalizer, TwoPointPopulationStd) {
  Stroke s = helpers::stroke_of_length(1, 2);
  s.records[0].pressure = 1.0;
  s.records[1].pressure = 3.0;
  FramingConfig config;
  config.attributes = {Attribute::Pressure};
  const auto stats = fit_normalizer({s}, config);
  EXPECT_DOUBLE_EQ(stats.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(stats.stddev[0], 1.0);
}

TEST(FitNormalizer, MatchesTwoPassOracle) {
  Rng rng(5);
  std::vector<Stroke> train;
  for (int i = 0; i < 20; ++i) train.push_back(random_stroke(1, 5 + static_cast<int>(rng.below(40)), rng));

  FramingConfig config;
  const auto stats = fit_normalizer(train, config);

  for (std::size_t a = 0; a < config.attributes.size(); ++a) {
    std::vector<double> values;
    for (const Stroke& s : train)
      for (const TouchRecord& r : s.records) values.push_back(attribute_value(r, config.attributes[a]));
    const auto [mean, stddev] = oracles::two_pass_stats(values);
    EXPECT_NEAR(stats.mean[a], mean, 1e-12 * std::max(1.0, std::abs(mean)));
    EXPECT_NEAR(stats.stddev[a], stddev, 1e-12 * std::max(1.0, stddev));
  }
}

TEST(FitNormalizer, EmptyTrainingSetIsAnError) {
  EXPECT_THROW(fit_normalizer({}, FramingConfig{}), ConfigError);
}

TEST(MakeWindows, MinimalStrokeGivesOneFrame) {
  FramingConfig config;
  const auto frames =
      make_windows(helpers::stroke_of_length(1, 5), config, identity_stats(config), 0, 0);
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].values.size(), 35);
}

TEST(MakeWindows, TwelveRecordStrokeGivesEightFrames) {
  FramingConfig config;
  const auto frames =
      make_windows(helpers::stroke_of_length(1, 12), config, identity_stats(config), 0, 0);
  EXPECT_EQ(frames.size(), 8u);
}

TEST(MakeWindows, StrokeShorterThanWindowGivesNoFrames) {
  FramingConfig config;
  config.window_size = 9;
  const auto frames =
      make_windows(helpers::stroke_of_length(1, 6), config, identity_stats(config), 0, 0);
  EXPECT_TRUE(frames.empty());
}

TEST(MakeWindows, RecordMajorFlattening) {
  FramingConfig config;
  config.window_size = 2;
  config.attributes = {Attribute::X, Attribute::Pressure};
  Stroke s = helpers::stroke_of_length(1, 3);
  s.records[0].x = 10.0;
  s.records[1].x = 11.0;
  s.records[2].x = 12.0;
  const auto frames = make_windows(s, config, identity_stats(config), 0, 0);
  ASSERT_EQ(frames.size(), 2u);
  // record 0 attributes first, then record 1
  EXPECT_DOUBLE_EQ(frames[0].values[0], 10.0);
  EXPECT_DOUBLE_EQ(frames[0].values[1], 0.5);
  EXPECT_DOUBLE_EQ(frames[0].values[2], 11.0);
  EXPECT_DOUBLE_EQ(frames[0].values[3], 0.5);
  EXPECT_DOUBLE_EQ(frames[1].values[0], 11.0);
}

TEST(MakeWindows, OffsetsMatchEnumerationOracle) {
  Rng rng(17);
  FramingConfig config;
  config.attributes = {Attribute::X};
  for (int trial = 0; trial < 200; ++trial) {
    const int length = 5 + static_cast<int>(rng.below(60));
    config.window_size = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(length - 1)));
    config.stride = 1 + static_cast<int>(rng.below(5));

    Stroke s = helpers::stroke_of_length(1, length);
    for (int i = 0; i < length; ++i) s.records[static_cast<std::size_t>(i)].x = i;

    const auto frames = make_windows(s, config, identity_stats(config), 0, 0);
    const auto offsets = oracles::enumerate_offsets(length, config.window_size, config.stride);
    ASSERT_EQ(frames.size(), offsets.size());
    for (std::size_t k = 0; k < frames.size(); ++k) {
      EXPECT_DOUBLE_EQ(frames[k].values[0], static_cast<double>(offsets[k]));
      EXPECT_EQ(static_cast<int>(frames[k].values.size()), config.window_size);
    }
  }
}

TEST(MakeWindows, ReferentiallyTransparent) {
  Rng rng(23);
  FramingConfig config;
  const Stroke s = random_stroke(3, 17, rng);
  const auto stats = fit_normalizer({s}, config);
  const auto a = make_windows(s, config, stats, 1, 4);
  const auto b = make_windows(s, config, stats, 1, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].values, b[i].values);
}

TEST(Framing, NormalizedTrainingStreamsAreStandardized) {
  Rng rng(31);
  std::vector<Stroke> train;
  for (int i = 0; i < 30; ++i)
    train.push_back(random_stroke(1, 5 + static_cast<int>(rng.below(30)), rng));

  FramingConfig config;
  const auto stats = fit_normalizer(train, config);

  for (std::size_t a = 0; a < config.attributes.size(); ++a) {
    std::vector<double> normalized;
    for (const Stroke& s : train)
      for (const TouchRecord& r : s.records)
        normalized.push_back((attribute_value(r, config.attributes[a]) - stats.mean[a]) /
                             stats.divisor(a));
    const auto [mean, stddev] = oracles::two_pass_stats(normalized);
    EXPECT_LT(std::abs(mean), 1e-9);
    if (stats.stddev[a] >= 1e-12) EXPECT_NEAR(stddev, 1.0, 1e-9);
  }
}

TEST(FrameStrokes, PacksLabelsAndRefs) {
  Rng rng(41);
  std::vector<Stroke> strokes = {random_stroke(10, 6, rng), random_stroke(20, 4, rng),
                                 random_stroke(10, 7, rng)};
  const auto users = UserTable::from_strokes(strokes);
  FramingConfig config;
  const auto stats = identity_stats(config);
  const auto set = frame_strokes(strokes, config, stats, users);

  // stroke 1 (length 4 < W) is skipped; strokes 0 and 2 give 2 + 3 frames
  EXPECT_EQ(set.skipped_strokes, 1u);
  ASSERT_EQ(set.rows(), 5);
  EXPECT_EQ(set.labels[0], users.index_of(10));
  EXPECT_EQ(set.stroke_refs[0], 0);
  EXPECT_EQ(set.stroke_refs[4], 2);
  EXPECT_EQ(set.labels[4], users.index_of(10));
}
