#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace flexcolloc::logging {

enum class Level { Off = 0, Info = 1, Debug = 2 };

/// Level from the FLEXCOLLOC_LOG environment variable ("info" or "debug"),
/// read once per process.
inline Level level() {
  static const Level cached = [] {
    const char* env = std::getenv("FLEXCOLLOC_LOG");
    if (env == nullptr) return Level::Off;
    if (std::strcmp(env, "debug") == 0) return Level::Debug;
    if (std::strcmp(env, "info") == 0) return Level::Info;
    return Level::Off;
  }();
  return cached;
}

inline bool enabled(Level lvl) { return static_cast<int>(level()) >= static_cast<int>(lvl); }

inline void write(Level lvl, const std::string& line) {
  if (!enabled(lvl)) return;
  std::fprintf(stderr, "[flexcolloc] %s\n", line.c_str());
}

inline void info(const std::string& line) { write(Level::Info, line); }
inline void debug(const std::string& line) { write(Level::Debug, line); }

}  // namespace flexcolloc::logging
