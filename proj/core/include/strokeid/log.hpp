#pragma once

#include <string>

namespace strokeid {

// Verbosity is read once from the STROKEID_LOG environment variable:
// quiet | warn | info | debug (default info). Messages go to stderr so
// command output stays clean.
enum class LogLevel : int { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_level();
void log_warn(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace strokeid
