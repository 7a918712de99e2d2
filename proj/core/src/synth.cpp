#include "strokeid/synth.hpp"

#include <algorithm>
#include <cmath>

#include "strokeid/errors.hpp"
#include "strokeid/rng.hpp"

namespace strokeid {

namespace {

// Generator spreads; per-user means sit on a grid spaced
// separability * sigma apart along each axis.
constexpr double kVelocitySigma = 3.0;    // px per step
constexpr double kPressureSigma = 0.02;
constexpr double kAreaSigma = 0.015;

// 0, -1, +1, -2, +2, ... so adjacent users differ by at least one grid step.
double alternating_offset(int user) {
  const int magnitude = (user + 1) / 2;
  return user % 2 == 1 ? -static_cast<double>(magnitude) : static_cast<double>(magnitude);
}

struct UserParams {
  double vx_mean, vy_mean;
  double pressure_mean, area_mean;
  double start_x_lo, start_x_hi, start_y_lo, start_y_hi;
};

UserParams user_params(const SynthSpec& spec, int user) {
  const double step = spec.separability * alternating_offset(user);
  UserParams p;
  p.vx_mean = step * kVelocitySigma;
  p.vy_mean = -step * kVelocitySigma;
  p.pressure_mean = 0.5 + step * kPressureSigma;
  p.area_mean = 0.35 + step * kAreaSigma;
  p.start_x_lo = 200.0;
  p.start_x_hi = 800.0;
  p.start_y_lo = 300.0;
  p.start_y_hi = 1200.0;
  return p;
}

}  // namespace

void SynthSpec::validate() const {
  if (num_users < 2) throw ConfigError("synthetic spec needs at least 2 users");
  if (strokes_per_user < 10) throw ConfigError("synthetic spec needs at least 10 strokes per user");
  if (min_length < 2 || max_length < min_length)
    throw ConfigError("synthetic stroke lengths must satisfy 2 <= min <= max");
  if (separability < 0) throw ConfigError("separability must be non-negative");
}

std::vector<TouchRecord> generate(const SynthSpec& spec) {
  spec.validate();

  std::vector<TouchRecord> records;
  for (int user = 0; user < spec.num_users; ++user) {
    const UserParams params = user_params(spec, user);
    Rng rng(combine_seed(spec.seed, static_cast<std::uint64_t>(user)));

    // Non-contiguous user ids so index/id mix-ups cannot go unnoticed.
    const std::int64_t user_id = 3 + 7 * static_cast<std::int64_t>(user);
    const std::int64_t phone_id = user % 4;
    std::int64_t clock = 1000 + static_cast<std::int64_t>(user) * 10'000'000;

    for (int stroke = 0; stroke < spec.strokes_per_user; ++stroke) {
      const auto length =
          static_cast<int>(rng.uniform_int(spec.min_length, spec.max_length));
      const std::int64_t doc_id = stroke % 3;
      const std::int64_t orientation = static_cast<std::int64_t>(rng.below(2));

      double x = rng.uniform(params.start_x_lo, params.start_x_hi);
      double y = rng.uniform(params.start_y_lo, params.start_y_hi);

      for (int t = 0; t < length; ++t) {
        TouchRecord r;
        r.phone_id = phone_id;
        r.user_id = user_id;
        r.doc_id = doc_id;
        r.timestamp = clock;
        r.action = t == 0 ? Action::Down : (t == length - 1 ? Action::Up : Action::Move);
        r.phone_orientation = orientation;
        r.x = x;
        r.y = y;
        r.pressure = std::max(0.0, rng.normal(params.pressure_mean, kPressureSigma));
        r.area = std::max(0.0, rng.normal(params.area_mean, kAreaSigma));
        r.finger_orientation = rng.normal(0.0, 0.05);
        records.push_back(r);

        x += rng.normal(params.vx_mean, kVelocitySigma);
        y += rng.normal(params.vy_mean, kVelocitySigma);
        clock += 10 + static_cast<std::int64_t>(rng.below(10));
      }
      clock += 500 + static_cast<std::int64_t>(rng.below(500));  // gap between strokes
    }
  }
  return records;
}

}  // namespace strokeid
