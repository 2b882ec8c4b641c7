#include "nqe/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace nqe::log {

Level threshold() {
  static const Level cached = [] {
    const char* env = std::getenv("NQE_DQC1_LOG");
    if (!env) return Level::warn;
    if (std::strcmp(env, "debug") == 0) return Level::debug;
    if (std::strcmp(env, "info") == 0) return Level::info;
    if (std::strcmp(env, "warn") == 0) return Level::warn;
    if (std::strcmp(env, "error") == 0) return Level::error;
    return Level::warn;
  }();
  return cached;
}

void write(Level level, const std::string& msg) {
  if (level < threshold()) return;
  static const char* const names[] = {"debug", "info", "warn", "error"};
  std::fprintf(stderr, "[nqe-dqc1] %s: %s\n",
               names[static_cast<int>(level)], msg.c_str());
}

}  // namespace nqe::log
