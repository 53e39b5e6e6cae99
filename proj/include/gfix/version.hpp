#pragma once

namespace gfix {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace gfix
