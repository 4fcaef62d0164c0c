#pragma once

namespace mcm {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace mcm
