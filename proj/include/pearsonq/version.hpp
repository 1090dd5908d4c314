#pragma once

namespace pearsonq {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pearsonq
