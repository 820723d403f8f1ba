#pragma once

namespace oddlink {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace oddlink
