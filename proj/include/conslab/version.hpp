#pragma once

namespace conslab {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace conslab
