#pragma once

namespace admix {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace admix
