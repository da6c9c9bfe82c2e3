#pragma once

namespace kerr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kerr
