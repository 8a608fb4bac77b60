#pragma once

#include <numbers>

// CODATA 2018 values, SI units.
namespace gapcavity::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double speed_of_light = 299792458.0;          // m/s
inline constexpr double hbar = 1.054571817e-34;                // J s
inline constexpr double epsilon0 = 8.8541878128e-12;           // F/m
inline constexpr double boltzmann = 1.380649e-23;              // J/K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double bohr_radius = 5.29177210903e-11;       // m

// 87Rb data used by the default configuration.
inline constexpr double rb87_mass = 86.909180527 * atomic_mass_unit;
inline constexpr double rb87_d2_wavelength_nm = 780.241;
inline constexpr double rb87_d2_cycling_dipole = 3.584e-29;    // C m
inline constexpr double rb87_d2_gamma_half_MHz = 3.0;          // gamma / 2pi

} // namespace gapcavity::constants
