#pragma once

#include <string>

namespace nqe::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3 };

// Threshold comes from the NQE_DQC1_LOG environment variable
// (debug|info|warn|error), read once; default warn. Messages go to stderr so
// they never perturb reproducible output files.
Level threshold();

void write(Level level, const std::string& msg);

inline void debug(const std::string& m) { write(Level::debug, m); }
inline void info(const std::string& m) { write(Level::info, m); }
inline void warn(const std::string& m) { write(Level::warn, m); }
inline void error(const std::string& m) { write(Level::error, m); }

}  // namespace nqe::log
