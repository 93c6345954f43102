#pragma once

namespace pnls {
inline constexpr const char* kVersion = "0.1.0";
}
