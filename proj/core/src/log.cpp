#include "mosaic/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace mosaic {

static LogLevel parse_level() {
  const char* raw = std::getenv("MOSAIC_LOG");
  if (raw == nullptr) return LogLevel::Warn;
  if (std::strcmp(raw, "error") == 0) return LogLevel::Error;
  if (std::strcmp(raw, "warn") == 0) return LogLevel::Warn;
  if (std::strcmp(raw, "info") == 0) return LogLevel::Info;
  if (std::strcmp(raw, "debug") == 0) return LogLevel::Debug;
  return LogLevel::Warn;
}

LogLevel log_threshold() {
  static const LogLevel level = parse_level();
  return level;
}

bool log_enabled(LogLevel level) {
  return static_cast<int>(level) <= static_cast<int>(log_threshold());
}

void log_line(LogLevel level, const std::string& message) {
  if (!log_enabled(level)) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[mosaic][%s] %s\n", names[static_cast<int>(level)],
               message.c_str());
}

}  // namespace mosaic
