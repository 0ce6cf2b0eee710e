#pragma once

namespace cppok {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cppok
