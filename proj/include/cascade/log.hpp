#pragma once

#include <string>

namespace cascade {

enum class LogLevel { Quiet = 0, Error = 1, Warn = 2, Info = 3, Debug = 4 };

// Reads CASCADE_SER_LOG on first use (quiet|error|warn|info|debug, default warn).
LogLevel log_level();
void set_log_level(LogLevel level);

void log_error(const std::string& msg);
void log_warn(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace cascade
