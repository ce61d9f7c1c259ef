#pragma once

namespace lde {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lde
