#pragma once

#include <numbers>

namespace casimir3 {

// CODATA 2018 values (SI). Exact constants are exact; epsilon_0 is the
// recommended measured value.
struct PhysicalConstants {
  double hbar;       // J s
  double c;          // m / s
  double k_B;        // J / K
  double epsilon_0;  // F / m
};

inline constexpr PhysicalConstants kCodata2018{
    .hbar = 6.62607015e-34 / (2.0 * std::numbers::pi),
    .c = 299792458.0,
    .k_B = 1.380649e-23,
    .epsilon_0 = 8.8541878128e-12,
};

inline constexpr double kElementaryCharge = 1.602176634e-19;  // C

namespace units {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double nm = 1e-9;
inline constexpr double um = 1e-6;

// Angular frequency (rad/s) from an ordinary frequency in Hz.
constexpr double hz(double f) { return kTwoPi * f; }
// Ordinary frequency (Hz) from an angular frequency.
constexpr double to_hz(double omega) { return omega / kTwoPi; }

// Photon energy in eV expressed as an angular frequency.
constexpr double ev_to_rad_per_s(double energy_ev) {
  return energy_ev * kElementaryCharge / kCodata2018.hbar;
}

}  // namespace units

}  // namespace casimir3
