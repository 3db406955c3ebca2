#pragma once

namespace mvlab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kRngName = "philox4x32-10";

}  // namespace mvlab
