#include "strokeid/framing.hpp"

#include <cmath>
#include <set>

#include "strokeid/errors.hpp"

namespace strokeid {

namespace {

constexpr std::string_view kNames[kAttributeCount] = {
    "action", "phone_orientation", "x", "y", "pressure", "area", "finger_orientation"};

}  // namespace

std::string_view attribute_name(Attribute a) { return kNames[static_cast<int>(a)]; }

std::optional<Attribute> attribute_from_name(std::string_view name) {
  for (int i = 0; i < kAttributeCount; ++i)
    if (name == kNames[i]) return static_cast<Attribute>(i);
  return std::nullopt;
}

double attribute_value(const TouchRecord& r, Attribute a) {
  switch (a) {
    case Attribute::Action: return static_cast<double>(r.action);
    case Attribute::PhoneOrientation: return static_cast<double>(r.phone_orientation);
    case Attribute::X: return r.x;
    case Attribute::Y: return r.y;
    case Attribute::Pressure: return r.pressure;
    case Attribute::Area: return r.area;
    case Attribute::FingerOrientation: return r.finger_orientation;
  }
  return 0.0;
}

std::vector<Attribute> default_attributes() {
  std::vector<Attribute> attrs;
  attrs.reserve(kAttributeCount);
  for (int i = 0; i < kAttributeCount; ++i) attrs.push_back(static_cast<Attribute>(i));
  return attrs;
}

void FramingConfig::validate() const {
  if (window_size < 2) throw ConfigError("window size must be at least 2");
  if (stride < 1) throw ConfigError("stride must be at least 1");
  if (attributes.empty()) throw ConfigError("attribute list must not be empty");
  std::set<Attribute> seen(attributes.begin(), attributes.end());
  if (seen.size() != attributes.size()) throw ConfigError("duplicate attribute in frame config");
}

NormalizationStats fit_normalizer(const std::vector<Stroke>& train,
                                  const FramingConfig& config) {
  config.validate();
  if (train.empty()) throw ConfigError("cannot fit a normalizer on an empty training set");

  const std::size_t n_attrs = config.attributes.size();
  NormalizationStats stats;
  stats.mean.assign(n_attrs, 0.0);
  stats.stddev.assign(n_attrs, 0.0);

  std::size_t count = 0;
  for (const Stroke& s : train) count += s.records.size();

  // Two passes keep the variance numerically honest on pixel-scale inputs.
  for (const Stroke& s : train)
    for (const TouchRecord& r : s.records)
      for (std::size_t a = 0; a < n_attrs; ++a)
        stats.mean[a] += attribute_value(r, config.attributes[a]);
  for (std::size_t a = 0; a < n_attrs; ++a) stats.mean[a] /= static_cast<double>(count);

  for (const Stroke& s : train)
    for (const TouchRecord& r : s.records)
      for (std::size_t a = 0; a < n_attrs; ++a) {
        const double d = attribute_value(r, config.attributes[a]) - stats.mean[a];
        stats.stddev[a] += d * d;
      }
  for (std::size_t a = 0; a < n_attrs; ++a)
    stats.stddev[a] = std::sqrt(stats.stddev[a] / static_cast<double>(count));

  return stats;
}

std::vector<WindowFrame> make_windows(const Stroke& stroke, const FramingConfig& config,
                                      const NormalizationStats& stats, int label,
                                      int stroke_ref) {
  const int length = static_cast<int>(stroke.length());
  const int w = config.window_size;
  std::vector<WindowFrame> frames;
  if (length < w) return frames;  // caller counts the skip

  const std::size_t n_attrs = config.attributes.size();
  const int count = (length - w) / config.stride + 1;
  frames.reserve(static_cast<std::size_t>(count));

  for (int k = 0; k < count; ++k) {
    const int offset = k * config.stride;
    WindowFrame frame;
    frame.label = label;
    frame.stroke_ref = stroke_ref;
    frame.values.resize(static_cast<Eigen::Index>(n_attrs) * w);
    Eigen::Index pos = 0;
    for (int t = 0; t < w; ++t) {
      const TouchRecord& r = stroke.records[static_cast<std::size_t>(offset + t)];
      for (std::size_t a = 0; a < n_attrs; ++a)
        frame.values[pos++] =
            (attribute_value(r, config.attributes[a]) - stats.mean[a]) / stats.divisor(a);
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

FrameSet frame_strokes(const std::vector<Stroke>& strokes, const FramingConfig& config,
                       const NormalizationStats& stats, const UserTable& users) {
  FrameSet set;
  std::vector<WindowFrame> all;
  for (std::size_t i = 0; i < strokes.size(); ++i) {
    const int label = users.index_of(strokes[i].user_id);
    if (label < 0)
      throw ConfigError("stroke from user " + std::to_string(strokes[i].user_id) +
                        " not present in the user table");
    std::vector<WindowFrame> frames =
        make_windows(strokes[i], config, stats, label, static_cast<int>(i));
    if (frames.empty()) {
      ++set.skipped_strokes;
      continue;
    }
    for (WindowFrame& f : frames) all.push_back(std::move(f));
  }

  set.inputs.resize(static_cast<Eigen::Index>(all.size()), config.input_dim());
  set.labels.resize(all.size());
  set.stroke_refs.resize(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    set.inputs.row(static_cast<Eigen::Index>(i)) = all[i].values.transpose();
    set.labels[i] = all[i].label;
    set.stroke_refs[i] = all[i].stroke_ref;
  }
  return set;
}

}  // namespace strokeid
