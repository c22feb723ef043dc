#pragma once

#include <numbers>

// Internal computations use SI angular units (rad/s) and seconds.
// All I/O (configs, CLI, CSV) uses cyclic MHz, ns and Oe; the conversions
// below are the only place the two conventions meet.

namespace mgm {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// cyclic MHz <-> angular rad/s
inline constexpr double rad_per_s_per_mhz = two_pi * 1e6;

constexpr double omega_from_mhz(double f_mhz) { return f_mhz * rad_per_s_per_mhz; }
constexpr double mhz_from_omega(double omega) { return omega / rad_per_s_per_mhz; }

// ns <-> s
constexpr double seconds_from_ns(double t_ns) { return t_ns * 1e-9; }
constexpr double ns_from_seconds(double t_s) { return t_s * 1e9; }

// Physical constants used by the coupling-strength formula.
inline constexpr double hbar_si = 1.0545718e-34;          // J s
inline constexpr double mu0_si = 1.2566370614e-6;         // N / A^2
inline constexpr double gamma_electron_si = 1.760859644e11; // rad / (s T)

// Gyromagnetic ratio of the magnon modes in field-map units, 2.8 MHz/Oe.
inline constexpr double gamma_mhz_per_oe = 2.8;

inline constexpr const char* version = "1.0.0";

} // namespace mgm
