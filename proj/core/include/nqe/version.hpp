#pragma once

namespace nqe {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace nqe
