#pragma once

namespace warpqi {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace warpqi
