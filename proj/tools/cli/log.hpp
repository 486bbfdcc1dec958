#pragma once

#include <string>

namespace fieldline::cli {

enum class LogLevel { Quiet = 0, Error = 1, Warn = 2, Info = 3, Debug = 4 };

/// level from FIELDLINE_LOG (quiet, error, warn, info, debug or 0..4); warn when unset
LogLevel logLevelFromEnv();
/// parse a level name; false when it is not recognised
bool parseLogLevel(const std::string& text, LogLevel& level);

void setLogLevel(LogLevel level);
LogLevel logLevel();

/// one line to stderr, serialised across threads
void log(LogLevel level, const std::string& message);

}  // namespace fieldline::cli
