#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "constants.hpp"
#include "error.hpp"

namespace gapcavity {

/// Harmonic magnetic trap centred in the gap plus an attractive -c4/s^4
/// Casimir-Polder term from each facet.
struct TrapConfig {
    double omega_trap = 0.0;  // rad/s
    double atom_mass = constants::rb87_mass;
    double c4 = 0.0;         // J m^4
    double gap_width = 2.0;  // um
    int z_samples = 1001;

    void validate() const
    {
        require(omega_trap > 0 && atom_mass > 0 && gap_width > 0, ErrorKind::InvalidArgument,
                "trap frequency, mass and gap width must be positive");
        require(c4 >= 0, ErrorKind::InvalidArgument, "c4 must be >= 0");
        require(z_samples >= 101, ErrorKind::InvalidArgument, "trap profile needs at least 101 samples");
    }
};

struct TrapSample {
    double z = 0.0;  // um from the gap centre
    double U = 0.0;  // J
};

inline double kelvin_to_uK(double k) { return k * 1e6; }
inline double joule_to_uK(double u) { return kelvin_to_uK(u / constants::boltzmann); }

inline double trap_potential(const TrapConfig& cfg, double z_um)
{
    const double z = z_um * 1e-6;
    const double half = 0.5 * cfg.gap_width * 1e-6;
    const double s1 = half + z;
    const double s2 = half - z;
    return 0.5 * cfg.atom_mass * cfg.omega_trap * cfg.omega_trap * z * z - cfg.c4 / std::pow(s1, 4) -
           cfg.c4 / std::pow(s2, 4);
}

/// Samples strictly inside the open interval (-d/2, d/2).
inline std::vector<TrapSample> potential_profile(const TrapConfig& cfg)
{
    cfg.validate();
    std::vector<TrapSample> out(static_cast<std::size_t>(cfg.z_samples));
    const double d = cfg.gap_width;
    for (int i = 0; i < cfg.z_samples; ++i) {
        const double z = -0.5 * d + d * (i + 1) / (cfg.z_samples + 1);
        out[static_cast<std::size_t>(i)] = {z, trap_potential(cfg, z)};
    }
    return out;
}

struct TrapAnalysis {
    bool has_minimum = false;
    double barrier_height = 0.0;     // J
    double barrier_height_uK = 0.0;  // uK
    double min_position = 0.0;       // um
};

/// A trap exists when some interior local minimum is enclosed by a positive
/// barrier on both sides; the barrier is the lower of the two side maxima.
inline TrapAnalysis trap_analysis(const TrapConfig& cfg)
{
    const auto prof = potential_profile(cfg);
    const std::size_t n = prof.size();
    std::vector<double> left_max(n), right_max(n);
    left_max[0] = prof[0].U;
    for (std::size_t i = 1; i < n; ++i) left_max[i] = std::max(left_max[i - 1], prof[i].U);
    right_max[n - 1] = prof[n - 1].U;
    for (std::size_t i = n - 1; i-- > 0;) right_max[i] = std::max(right_max[i + 1], prof[i].U);

    TrapAnalysis best;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double u = prof[i].U;
        const bool minimum = u <= prof[i - 1].U && u <= prof[i + 1].U && (u < prof[i - 1].U || u < prof[i + 1].U);
        if (!minimum) continue;
        const double barrier = std::min(left_max[i], right_max[i]) - u;
        if (barrier > 0.0 && barrier > best.barrier_height) {
            best.has_minimum = true;
            best.barrier_height = barrier;
            best.min_position = prof[i].z;
        }
    }
    best.barrier_height_uK = joule_to_uK(best.barrier_height);
    return best;
}

} // namespace gapcavity
