#include "cascade/log.hpp"

#include <cstdlib>
#include <iostream>

namespace cascade {

namespace {

LogLevel parse_level(const char* s) {
    std::string v(s);
    if (v == "quiet" || v == "0") return LogLevel::Quiet;
    if (v == "error" || v == "1") return LogLevel::Error;
    if (v == "warn" || v == "2") return LogLevel::Warn;
    if (v == "info" || v == "3") return LogLevel::Info;
    if (v == "debug" || v == "4") return LogLevel::Debug;
    return LogLevel::Warn;
}

LogLevel& level_ref() {
    static LogLevel level = [] {
        const char* env = std::getenv("CASCADE_SER_LOG");
        return env ? parse_level(env) : LogLevel::Warn;
    }();
    return level;
}

void emit(LogLevel at, const char* tag, const std::string& msg) {
    if (level_ref() >= at) std::cerr << tag << msg << "\n";
}

}  // namespace

LogLevel log_level() { return level_ref(); }
void set_log_level(LogLevel level) { level_ref() = level; }

void log_error(const std::string& msg) { emit(LogLevel::Error, "error: ", msg); }
void log_warn(const std::string& msg) { emit(LogLevel::Warn, "warning: ", msg); }
void log_info(const std::string& msg) { emit(LogLevel::Info, "info: ", msg); }
void log_debug(const std::string& msg) { emit(LogLevel::Debug, "debug: ", msg); }

}  // namespace cascade
