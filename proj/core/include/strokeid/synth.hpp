#pragma once

#include <cstdint>
#include <vector>

#include "strokeid/types.hpp"

namespace strokeid {

// Synthetic stroke population with controllable inter-user separation.
// Per-user generator parameters (step velocity, pressure, area) are placed
// on a grid spaced `separability` generator-stds apart, so higher values
// make users easier to tell apart.
struct SynthSpec {
  int num_users = 10;
  int strokes_per_user = 50;
  int min_length = 3;  // below the filter cutoff on purpose
  int max_length = 60;
  double separability = 4.0;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

// Deterministic per (seed, user). Every emitted run is a well-formed
// Down, Move..., Up sequence with strictly increasing per-user timestamps,
// so it re-segments to exactly one stroke.
std::vector<TouchRecord> generate(const SynthSpec& spec);

}  // namespace strokeid
