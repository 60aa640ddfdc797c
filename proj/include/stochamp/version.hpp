#pragma once

namespace stochamp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stochamp
