#include "log.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace fieldline::cli {

namespace {

std::atomic<int> currentLevel{static_cast<int>(LogLevel::Warn)};
std::mutex streamMutex;

const char* levelTag(LogLevel level)
{
    switch(level) {
        case LogLevel::Error: return "error";
        case LogLevel::Warn: return "warn";
        case LogLevel::Info: return "info";
        case LogLevel::Debug: return "debug";
        default: return "";
    }
}

}  // namespace

bool parseLogLevel(const std::string& text, LogLevel& level)
{
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if(t == "quiet" || t == "off" || t == "0") level = LogLevel::Quiet;
    else if(t == "error" || t == "1") level = LogLevel::Error;
    else if(t == "warn" || t == "warning" || t == "2") level = LogLevel::Warn;
    else if(t == "info" || t == "3") level = LogLevel::Info;
    else if(t == "debug" || t == "4") level = LogLevel::Debug;
    else return false;
    return true;
}

LogLevel logLevelFromEnv()
{
    const char* env = std::getenv("FIELDLINE_LOG");
    LogLevel level = LogLevel::Warn;
    if(env && *env && !parseLogLevel(env, level)) {
        log(LogLevel::Warn, std::string("ignoring unrecognised FIELDLINE_LOG='") + env + "'");
        level = LogLevel::Warn;
    }
    return level;
}

void setLogLevel(LogLevel level) { currentLevel = static_cast<int>(level); }

LogLevel logLevel() { return static_cast<LogLevel>(currentLevel.load()); }

void log(LogLevel level, const std::string& message)
{
    if(level == LogLevel::Quiet || static_cast<int>(level) > currentLevel.load()) return;
    std::lock_guard<std::mutex> lock(streamMutex);
    std::cerr << "fieldline " << levelTag(level) << ": " << message << '\n';
}

}  // namespace fieldline::cli
