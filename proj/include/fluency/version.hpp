#pragma once

#include <string>

namespace fluency {

inline constexpr const char* kVersion = "1.0.0";

// Tool version, file format versions, RNG algorithm and active SIMD kernels.
std::string version_info();

}  // namespace fluency
