#pragma once

#include <numbers>

// Unit conventions: all frequencies inside the library are angular
// frequencies in rad/s with hbar = 1, so Hamiltonians are in rad/s too.
// Config files and the CLI speak ordinary frequencies (kHz, MHz, Hz);
// these helpers are the single conversion authority.

namespace jch {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double hz_to_rad(double f_hz) { return two_pi * f_hz; }
inline constexpr double khz_to_rad(double f_khz) { return two_pi * 1.0e3 * f_khz; }
inline constexpr double mhz_to_rad(double f_mhz) { return two_pi * 1.0e6 * f_mhz; }
inline constexpr double rad_to_hz(double w) { return w / two_pi; }
inline constexpr double rad_to_khz(double w) { return w / (two_pi * 1.0e3); }

inline constexpr double us_to_s(double t_us) { return 1.0e-6 * t_us; }
inline constexpr double s_to_us(double t_s) { return 1.0e6 * t_s; }

namespace constants {
// CODATA 2018
inline constexpr double elementary_charge = 1.602176634e-19;   // C
inline constexpr double epsilon0 = 8.8541878128e-12;           // F/m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
// 40Ca+ (mass of the neutral atom is close enough at our precision)
inline constexpr double mass_ca40 = 39.9625909 * atomic_mass_unit;  // kg
}  // namespace constants

}  // namespace jch
