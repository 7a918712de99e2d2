#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "strokeid/errors.hpp"
#include "strokeid/types.hpp"

namespace strokeid {

// Parses a comma-separated touch log: 11 columns per row in the order
// phone_id, user_id, doc_id, timestamp, action, phone_orientation,
// x, y, pressure, area, finger_orientation. A single leading header line
// (detected by a non-numeric first field) is skipped. Throws ParseError
// with the offending line number on wrong column counts, non-finite
// numeric fields, or an action outside {0, 1, 2}.
std::vector<TouchRecord> parse_csv(std::istream& in);

// Inverse of parse_csv. Floating point fields are written with enough
// digits to round-trip bit-exactly.
void write_csv(const std::vector<TouchRecord>& records, std::ostream& out,
               bool header = false);

struct SegmentationResult {
  std::vector<Stroke> strokes;
  std::size_t dropped_records = 0;  // orphan events and runs without an Up
};

// Groups records by (user_id, phone_id, doc_id), time-sorts each group, and
// cuts maximal Down, Move*, Up runs. Malformed runs (orphan Move/Up before a
// Down, or a run truncated by a new Down or by the end of its group) are
// dropped and counted, never fatal.
SegmentationResult segment_strokes(std::vector<TouchRecord> records);

// Removes strokes shorter than 5 records and tags survivors Short (5-12)
// or Long (>= 13). Input order is preserved; idempotent.
std::vector<Stroke> filter_and_classify(std::vector<Stroke> strokes);

struct SplitRatios {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

struct DatasetSplit {
  std::vector<Stroke> train;
  std::vector<Stroke> val;
  std::vector<Stroke> test;
  std::uint64_t seed = 0;
};

// Per-user seeded shuffle, then ratio slicing: val and test sizes are
// floored, the remainder goes to train. Every user needs at least 5 strokes;
// otherwise InsufficientDataError names the first offending user.
DatasetSplit split_dataset(std::vector<Stroke> strokes, const SplitRatios& ratios,
                           std::uint64_t seed);

struct ClassWeightTable {
  std::map<std::int64_t, double> weights;

  double at(std::int64_t user_id) const;
};

// Inverse-frequency weights: w_u = N_total / (K * N_u) over the training
// strokes, so sum_u w_u * N_u == N_total.
ClassWeightTable compute_class_weights(const std::vector<Stroke>& train);

// Same, but every user of `users` must appear in the training set.
ClassWeightTable compute_class_weights(const std::vector<Stroke>& train,
                                       const UserTable& users);

}  // namespace strokeid
