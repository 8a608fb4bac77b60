#pragma once

#include <cmath>
#include <complex>

#include "error.hpp"
#include "field.hpp"
#include "gap.hpp"
#include "propagation.hpp"

namespace gapcavity {

/// Direct bounce-by-bounce simulation of the gap, used to cross-check the
/// closed-form series. The transverse field is carried explicitly across the
/// gap one width at a time; every arrival at a facet couples a share back
/// into the guided mode through the normalized overlap, and the remainder is
/// reflected with the air-side coefficient -r.
inline GapResult simulate_gap_bounces(const SampledField& mode, const GapConfig& cfg)
{
    cfg.validate();
    const auto f = fresnel_interface(cfg.n_interface);
    const double k = wavenumber(mode.wavelength);

    SampledField launched = mode;
    launched.medium_index = 1.0;
    SampledField profile = launched;

    AngularSpectrumPropagator step(profile);

    GapResult out;
    complex transmitted{};
    complex reflected = f.r;
    double amplitude = f.t;  // t (-r)^n after n internal reflections
    for (int n = 0;; ++n) {
        const int p = n / 2;
        if (n % 2 == 0 && p > 0 && std::pow(f.r, 2 * p) < cfg.series_tolerance) break;
        if (p >= cfg.p_max) fail(ErrorKind::SeriesNotConverged, "bounce simulation hit p_max");

        profile = step.propagate(profile, cfg.d);
        const complex projection = overlap(launched, profile);
        const double travelled = (n + 1) * cfg.d;
        const complex q =
            cfg.phase == PhaseConvention::Full ? projection : std::polar(std::abs(projection), k * travelled);

        const complex coupled = f.t_back * amplitude * q;
        if (n % 2 == 0) {
            transmitted += coupled;
            out.q_plus.push_back(q);
        } else {
            reflected += coupled;
            out.q_minus.push_back(q);
        }
        amplitude *= -f.r;
        if (f.r == 0.0 && n >= 1) break;
    }
    out.transmission = transmitted;
    out.reflection = reflected;
    out.R = std::norm(reflected);
    out.T = std::norm(transmitted);
    out.loss = 1.0 - out.R - out.T;
    return out;
}

} // namespace gapcavity
