#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "constants.hpp"
#include "error.hpp"

namespace gapcavity {

// Fabry-Perot bookkeeping. Lengths in um, propagation loss alpha in 1/cm,
// frequencies in GHz. The finesse argument g is the round-trip amplitude
// factor sqrt(R_left R_right) exp(-alpha l) (times any gap factor).

inline constexpr double um_to_cm = 1e-4;

struct CavitySpec {
    double length = 0.0;  // um
    double n_group = 1.0;
    double alpha = 0.0;  // 1/cm
    double mirror_R_left = 1.0;
    double mirror_R_right = 1.0;
    std::optional<double> gap_round_trip_amplitude;

    void validate() const
    {
        require(length > 0.0, ErrorKind::InvalidArgument, "cavity length must be positive");
        require(n_group > 0.0, ErrorKind::InvalidArgument, "group index must be positive");
        require(alpha >= 0.0, ErrorKind::InvalidArgument, "alpha must be >= 0");
        require(mirror_R_left >= 0.0 && mirror_R_left <= 1.0 && mirror_R_right >= 0.0 && mirror_R_right <= 1.0,
                ErrorKind::InvalidArgument, "mirror reflectivities must lie in [0, 1]");
        if (gap_round_trip_amplitude) {
            require(*gap_round_trip_amplitude > 0.0 && *gap_round_trip_amplitude <= 1.0, ErrorKind::InvalidArgument,
                    "gap round-trip amplitude must lie in (0, 1]");
        }
    }
};

/// F = pi sqrt(g) / (1 - g).
inline double finesse_from_round_trip(double g)
{
    require(g > 0.0 && g < 1.0, ErrorKind::OutOfRange,
            "round-trip factor must lie in (0, 1), got " + std::to_string(g));
    return constants::pi * std::sqrt(g) / (1.0 - g);
}

inline double round_trip_amplitude(const CavitySpec& spec)
{
    spec.validate();
    double g = std::sqrt(spec.mirror_R_left * spec.mirror_R_right) * std::exp(-spec.alpha * spec.length * um_to_cm);
    if (spec.gap_round_trip_amplitude) g *= *spec.gap_round_trip_amplitude;
    return g;
}

/// c / (2 n_g L) in GHz.
inline double free_spectral_range(double length_um, double n_group)
{
    require(length_um > 0.0 && n_group > 0.0, ErrorKind::InvalidArgument, "length and group index must be positive");
    return constants::speed_of_light / (2.0 * n_group * length_um * 1e-6) * 1e-9;
}

/// Full resonance width 2 kappa / 2 pi in GHz.
inline double linewidth(double finesse, double fsr_GHz)
{
    require(finesse > 0.0, ErrorKind::InvalidArgument, "finesse must be positive");
    return fsr_GHz / finesse;
}

/// Round-trip factor g in (0, 1) with finesse_from_round_trip(g) == finesse,
/// by bisection (the finesse is strictly increasing in g).
inline double round_trip_from_finesse(double finesse)
{
    require(finesse > 0.0 && std::isfinite(finesse), ErrorKind::NoSolution, "finesse must be positive and finite");
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (constants::pi * std::sqrt(mid) / (1.0 - mid) < finesse) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Propagation loss (1/cm) implied by a measured full width, with both
/// mirrors of reflectivity mirror_R.
inline double alpha_from_linewidth(double width_GHz, double length_um, double n_group, double mirror_R)
{
    require(length_um > 0.0 && n_group > 0.0, ErrorKind::InvalidArgument, "length and group index must be positive");
    require(mirror_R > 0.0 && mirror_R <= 1.0, ErrorKind::InvalidArgument, "mirror reflectivity must lie in (0, 1]");
    require(width_GHz > 0.0, ErrorKind::NoSolution, "linewidth must be positive");
    const double finesse = free_spectral_range(length_um, n_group) / width_GHz;
    const double g = round_trip_from_finesse(finesse);
    const double propagation = g / mirror_R;
    if (!(propagation > 0.0 && propagation < 1.0)) {
        fail(ErrorKind::NoSolution, "implied propagation factor " + std::to_string(propagation) + " outside (0, 1)");
    }
    return -std::log(propagation) / (length_um * um_to_cm);
}

// ---------------------------------------------------------------------------
// Thin-film mirrors

struct Layer {
    double index = 1.0;
    double thickness = 0.0;  // nm
};

/// Layers listed from the incident medium (the waveguide) towards the exit medium.
struct MirrorStack {
    std::vector<Layer> layers;
    double n_incident = 1.0;
    double n_exit = 1.0;

    void validate() const
    {
        require(n_incident >= 1.0 && n_exit >= 1.0, ErrorKind::InvalidIndex, "stack media indices must be >= 1");
        for (const auto& l : layers) {
            require(l.index >= 1.0, ErrorKind::InvalidIndex, "layer index must be >= 1");
            require(l.thickness > 0.0, ErrorKind::InvalidArgument, "layer thickness must be positive");
        }
    }
};

/// Quarter-wave pairs at design_wavelength. low_first puts the low-index
/// layer against the incident medium, which is what a high-index guide needs.
inline MirrorStack quarter_wave_stack(int pairs, double n_low, double n_high, double design_wavelength_nm,
                                      double n_incident, double n_exit, bool low_first = true)
{
    require(pairs >= 0, ErrorKind::InvalidArgument, "pair count must be >= 0");
    MirrorStack s;
    s.n_incident = n_incident;
    s.n_exit = n_exit;
    const Layer low{n_low, design_wavelength_nm / (4.0 * n_low)};
    const Layer high{n_high, design_wavelength_nm / (4.0 * n_high)};
    for (int i = 0; i < pairs; ++i) {
        s.layers.push_back(low_first ? low : high);
        s.layers.push_back(low_first ? high : low);
    }
    return s;
}

/// Intensity reflectivity at normal incidence from the characteristic-matrix product.
inline double stack_reflectivity(const MirrorStack& stack, double wavelength_nm)
{
    stack.validate();
    require(wavelength_nm > 0.0, ErrorKind::InvalidArgument, "wavelength must be positive");
    using c = std::complex<double>;
    const c i{0.0, 1.0};
    c m11{1.0}, m12{0.0}, m21{0.0}, m22{1.0};
    for (const auto& l : stack.layers) {
        const double delta = 2.0 * constants::pi * l.index * l.thickness / wavelength_nm;
        const c a = std::cos(delta);
        const c b = i * std::sin(delta) / l.index;
        const c cc = i * l.index * std::sin(delta);
        const c n11 = m11 * a + m12 * cc;
        const c n12 = m11 * b + m12 * a;
        const c n21 = m21 * a + m22 * cc;
        const c n22 = m21 * b + m22 * a;
        m11 = n11;
        m12 = n12;
        m21 = n21;
        m22 = n22;
    }
    const c B = m11 + m12 * stack.n_exit;
    const c C = m21 + m22 * stack.n_exit;
    const c r = (stack.n_incident * B - C) / (stack.n_incident * B + C);
    return std::norm(r);
}

} // namespace gapcavity
