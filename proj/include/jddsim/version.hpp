#pragma once

namespace jddsim {

inline constexpr const char* kToolName = "jddsim";
inline constexpr const char* kVersion = "0.1.0";

}
