#pragma once

namespace pda {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pda
