#include "strokeid/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace strokeid {

namespace {

LogLevel detect_level() {
  const char* env = std::getenv("STROKEID_LOG");
  if (env == nullptr) return LogLevel::Info;
  if (std::strcmp(env, "quiet") == 0) return LogLevel::Quiet;
  if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
  if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
  return LogLevel::Info;
}

void emit(const char* tag, const std::string& msg) {
  std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

}  // namespace

LogLevel log_level() {
  static const LogLevel level = detect_level();
  return level;
}

void log_warn(const std::string& msg) {
  if (log_level() >= LogLevel::Warn) emit("warn", msg);
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) emit("info", msg);
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) emit("debug", msg);
}

}  // namespace strokeid
