#include "sentinet/log.hpp"

#include <cstdio>
#include <cstdlib>

namespace sentinet {

namespace {
LogLevel parse_level() {
  const char* env = std::getenv("SENTINET_LOG");
  if (!env) return LogLevel::warn;
  std::string v(env);
  if (v == "quiet") return LogLevel::quiet;
  if (v == "warn") return LogLevel::warn;
  if (v == "info") return LogLevel::info;
  if (v == "debug") return LogLevel::debug;
  std::fprintf(stderr, "[warn] SENTINET_LOG=%s not recognized, using warn\n", env);
  return LogLevel::warn;
}
}  // namespace

LogLevel log_level() {
  static LogLevel lvl = parse_level();
  return lvl;
}

void log_warn(const std::string& msg) {
  if (log_level() >= LogLevel::warn) std::fprintf(stderr, "[warn] %s\n", msg.c_str());
}
void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::info) std::fprintf(stderr, "[info] %s\n", msg.c_str());
}
void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::debug) std::fprintf(stderr, "[debug] %s\n", msg.c_str());
}

}  // namespace sentinet
