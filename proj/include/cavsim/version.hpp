#pragma once

namespace cavsim {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace cavsim
