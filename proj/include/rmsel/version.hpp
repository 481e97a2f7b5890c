#pragma once

namespace rmsel {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rmsel
