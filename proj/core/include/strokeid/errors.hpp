#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace strokeid {

// Malformed input data (CSV rows, bad numeric fields). Carries the 1-based
// line number of the offending row.
struct ParseError : std::runtime_error {
  ParseError(std::size_t line_number, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + what),
        line(line_number) {}
  std::size_t line;
};

// Invalid configuration or preconditions violated by the caller.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A user has too little data to honor the requested split/filter.
struct InsufficientDataError : ConfigError {
  InsufficientDataError(std::int64_t user, const std::string& what)
      : ConfigError(what), user_id(user) {}
  std::int64_t user_id;
};

// Non-finite values encountered inside numeric kernels.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss.
struct DivergenceError : std::runtime_error {
  DivergenceError(int at_epoch, const std::string& what)
      : std::runtime_error(what), epoch(at_epoch) {}
  int epoch;
};

// Checkpoint files that fail to load or do not match the run configuration.
struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem reads/writes that failed.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace strokeid
