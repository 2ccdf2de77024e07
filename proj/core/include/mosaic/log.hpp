#pragma once

#include <string>

namespace mosaic {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Threshold comes from MOSAIC_LOG (error|warn|info|debug), read once.
// Unset or unrecognized values fall back to warn.
LogLevel log_threshold();

bool log_enabled(LogLevel level);

// Diagnostics go to stderr only; trace and summary data never pass through
// here.
void log_line(LogLevel level, const std::string& message);

}  // namespace mosaic
