#pragma once

#include <numbers>

namespace hqsim::units {

// e^2 / (1 nm) in Gaussian units, expressed in meV (CODATA 2018).
inline constexpr double kCoulombMeVnm = 1439.964547;
// hbar in meV * ps.
inline constexpr double kHbarMeVps = 0.6582119569;
// h c / (1 cm) in meV.
inline constexpr double kMeVPerCm1 = 0.12398419843;
// Room-temperature thermal energy used for the kT flag in sweeps.
inline constexpr double kRoomTemperatureMeV = 22.0;

inline constexpr double pi = std::numbers::pi;

inline constexpr double cm1_to_meV(double wavenumber) { return wavenumber * kMeVPerCm1; }
inline constexpr double meV_to_cm1(double energy) { return energy / kMeVPerCm1; }

// Vacuum wavenumber k0 = omega / c in rad/nm for omega given in cm^-1.
inline constexpr double vacuum_k0(double wavenumber) { return 2.0 * pi * wavenumber * 1e-7; }

}  // namespace hqsim::units
