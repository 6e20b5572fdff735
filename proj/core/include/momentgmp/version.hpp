#pragma once

namespace momentgmp {
inline constexpr const char* kVersion = "0.1.0";
}
