#pragma once

#include <string_view>

namespace evotree {

inline constexpr std::string_view kToolName = "evotree";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace evotree
