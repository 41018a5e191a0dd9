#pragma once

namespace cbound {

inline constexpr const char* kToolName = "cbound";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace cbound
