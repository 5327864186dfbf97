#pragma once
// Tiny stderr logger. Verbosity comes from the SENTINET_LOG environment
// variable: quiet | warn | info | debug (default warn).

#include <string>

namespace sentinet {

enum class LogLevel : int { quiet = 0, warn = 1, info = 2, debug = 3 };

LogLevel log_level();
void log_warn(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace sentinet
