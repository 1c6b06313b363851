#pragma once

namespace coe {
inline constexpr const char* kToolName = "coe";
inline constexpr const char* kToolVersion = "0.1.0";
}  // namespace coe
