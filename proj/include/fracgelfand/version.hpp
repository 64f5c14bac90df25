#pragma once

namespace fracgelfand {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fracgelfand
