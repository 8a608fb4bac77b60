#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "cavity.hpp"
#include "constants.hpp"
#include "error.hpp"
#include "waveguide.hpp"

namespace gapcavity {

struct AtomParams {
    double dipole_moment = constants::rb87_d2_cycling_dipole;  // C m
    double gamma_half = constants::rb87_d2_gamma_half_MHz;     // gamma / 2 pi, MHz
    double transition_wavelength = 780.0;                      // nm
    double mass = constants::rb87_mass;                        // kg

    void validate() const
    {
        require(dipole_moment > 0 && gamma_half > 0 && transition_wavelength > 0 && mass > 0,
                ErrorKind::InvalidArgument, "atom parameters must be positive");
    }
};

struct CqedBudget {
    double finesse_intr = 0.0;
    double fsr_GHz = 0.0;
    double g_over_2pi = 0.0;           // MHz
    double kappa_intr_over_2pi = 0.0;  // GHz
    double kappa_T_over_2pi = 0.0;     // GHz
    double kappa_total_over_2pi = 0.0; // GHz
    double cooperativity = 0.0;
    double enhancement = 1.0;
    bool lossless = false;  // no intrinsic loss: kappa -> 0 and C diverges
};

/// Single-photon coupling g / 2 pi in MHz for mode volume V = area * length.
inline double coupling_g(double mode_area_um2, double cavity_length_um, const AtomParams& atom)
{
    atom.validate();
    require(mode_area_um2 > 0 && cavity_length_um > 0, ErrorKind::InvalidArgument,
            "mode area and cavity length must be positive");
    const double volume = mode_area_um2 * 1e-12 * cavity_length_um * 1e-6;
    const double omega = 2.0 * constants::pi * constants::speed_of_light / (atom.transition_wavelength * 1e-9);
    const double e_vac = std::sqrt(constants::hbar * omega / (2.0 * constants::epsilon0 * volume));
    const double g = atom.dipole_moment * e_vac / constants::hbar;  // rad/s
    return g / (2.0 * constants::pi) * 1e-6;
}

/// Mirror transmission matched to the intrinsic loss: returns {kappa_T, kappa_total}.
inline std::pair<double, double> optimize_mirror_transmission(double kappa_intr)
{
    require(kappa_intr >= 0.0, ErrorKind::InvalidArgument, "intrinsic loss rate must be >= 0");
    return {kappa_intr, 2.0 * kappa_intr};
}

/// C = enhancement * g^2 / (kappa gamma). g and gamma in MHz, kappa in GHz,
/// all as rate / 2 pi.
inline double cooperativity(double g_over_2pi_MHz, double kappa_over_2pi_GHz, double gamma_over_2pi_MHz,
                            double enhancement = 1.0)
{
    require(g_over_2pi_MHz >= 0 && kappa_over_2pi_GHz > 0 && gamma_over_2pi_MHz > 0, ErrorKind::InvalidArgument,
            "cooperativity needs g >= 0 and positive kappa, gamma");
    require(enhancement >= 1.0, ErrorKind::InvalidArgument, "enhancement must be >= 1");
    return enhancement * g_over_2pi_MHz * g_over_2pi_MHz / (kappa_over_2pi_GHz * 1e3 * gamma_over_2pi_MHz);
}

/// Loss and coupling budget: round trip -> finesse -> FSR -> kappa_intr ->
/// matched mirrors -> g -> C. Mirror reflectivities in `spec` are ignored;
/// the intrinsic budget assumes perfect mirrors and adds kappa_T afterwards.
inline CqedBudget full_budget(double mode_area_um2, CavitySpec spec, const AtomParams& atom, double enhancement = 1.0)
{
    spec.mirror_R_left = 1.0;
    spec.mirror_R_right = 1.0;
    CqedBudget b;
    b.enhancement = enhancement;
    b.fsr_GHz = free_spectral_range(spec.length, spec.n_group);
    b.g_over_2pi = coupling_g(mode_area_um2, spec.length, atom);
    const double g_rt = round_trip_amplitude(spec);
    if (g_rt >= 1.0) {
        b.lossless = true;
        b.finesse_intr = std::numeric_limits<double>::infinity();
        b.cooperativity = std::numeric_limits<double>::infinity();
        return b;
    }
    b.finesse_intr = finesse_from_round_trip(g_rt);
    b.kappa_intr_over_2pi = 0.5 * linewidth(b.finesse_intr, b.fsr_GHz);
    std::tie(b.kappa_T_over_2pi, b.kappa_total_over_2pi) = optimize_mirror_transmission(b.kappa_intr_over_2pi);
    b.cooperativity = cooperativity(b.g_over_2pi, b.kappa_total_over_2pi, atom.gamma_half, enhancement);
    return b;
}

inline CqedBudget full_budget(const ModeSolution& mode, CavitySpec spec, double gap_amplitude, const AtomParams& atom,
                              double enhancement = 1.0)
{
    spec.gap_round_trip_amplitude = gap_amplitude;
    return full_budget(mode.mode_area, spec, atom, enhancement);
}

} // namespace gapcavity
