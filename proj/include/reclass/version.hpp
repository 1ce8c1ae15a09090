#pragma once

namespace reclass {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace reclass
