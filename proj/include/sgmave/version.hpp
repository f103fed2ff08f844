#pragma once

namespace sgmave {
inline constexpr const char* kVersion = "0.1.0";
}
