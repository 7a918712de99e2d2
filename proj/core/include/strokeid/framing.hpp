#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string_view>
#include <vector>

#include "strokeid/types.hpp"

namespace strokeid {

// The biometric record attributes a network may consume. phone_id, doc_id
// and timestamp are not biometric data and user_id is the label, so none of
// them is representable here.
enum class Attribute : int {
  Action = 0,
  PhoneOrientation,
  X,
  Y,
  Pressure,
  Area,
  FingerOrientation,
};

inline constexpr int kAttributeCount = 7;

std::string_view attribute_name(Attribute a);
std::optional<Attribute> attribute_from_name(std::string_view name);
double attribute_value(const TouchRecord& r, Attribute a);

// All seven attributes in canonical order.
std::vector<Attribute> default_attributes();

struct FramingConfig {
  int window_size = 5;
  int stride = 1;
  std::vector<Attribute> attributes = default_attributes();

  int input_dim() const { return window_size * static_cast<int>(attributes.size()); }
  void validate() const;  // throws ConfigError

  bool operator==(const FramingConfig&) const = default;
};

// Per-attribute mean and population std, fitted on the training split only.
struct NormalizationStats {
  std::vector<double> mean;
  std::vector<double> stddev;

  // Attributes with (near-)zero spread are passed through un-scaled.
  double divisor(std::size_t i) const { return stddev[i] < 1e-12 ? 1.0 : stddev[i]; }
};

NormalizationStats fit_normalizer(const std::vector<Stroke>& train,
                                  const FramingConfig& config);

// One flattened, normalized window: record 0's attributes, then record 1's, ...
struct WindowFrame {
  Eigen::VectorXd values;  // length |attributes| * W
  int label = -1;          // user index
  int stroke_ref = -1;     // index of the source stroke
};

// Sliding windows at offsets 0, stride, 2*stride, ... A stroke shorter than
// the window yields no frames (the caller counts the skip).
std::vector<WindowFrame> make_windows(const Stroke& stroke, const FramingConfig& config,
                                      const NormalizationStats& stats, int label = -1,
                                      int stroke_ref = -1);

// Frames for a whole stroke collection packed into one matrix, one row per
// frame. Frames of stroke i are contiguous and keep stroke_refs[row] == i.
struct FrameSet {
  Eigen::MatrixXd inputs;
  std::vector<int> labels;
  std::vector<int> stroke_refs;
  std::size_t skipped_strokes = 0;

  Eigen::Index rows() const { return inputs.rows(); }
};

FrameSet frame_strokes(const std::vector<Stroke>& strokes, const FramingConfig& config,
                       const NormalizationStats& stats, const UserTable& users);

}  // namespace strokeid
