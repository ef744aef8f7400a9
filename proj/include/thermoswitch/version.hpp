#pragma once

namespace thermoswitch {

inline constexpr const char* version = "0.1.0";

}  // namespace thermoswitch
