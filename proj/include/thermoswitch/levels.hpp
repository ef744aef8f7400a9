#pragma once

// Labels of the four-level photoisomer spectrum: lower/upper adiabatic branch
// at the cis (0) and trans (pi) angles.

namespace thermoswitch::labels {

inline constexpr const char* e_minus_0 = "E-(0)";
inline constexpr const char* e_minus_pi = "E-(pi)";
inline constexpr const char* e_plus_0 = "E+(0)";
inline constexpr const char* e_plus_pi = "E+(pi)";

}  // namespace thermoswitch::labels
