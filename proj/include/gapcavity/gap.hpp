#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "constants.hpp"
#include "error.hpp"
#include "field.hpp"
#include "propagation.hpp"
#include "waveguide.hpp"

namespace gapcavity {

/// How the overlap factor of a bounce that travelled a distance s is formed.
enum class PhaseConvention {
    /// |overlap(E0, P_s E0)| * exp(i k s): diffraction only reduces the
    /// amplitude; the phase is the plane-wave phase k s.
    Profile,
    /// overlap(E0, P_s E0) as computed, including the extra diffraction phase.
    Full,
};

struct GapConfig {
    double d = 1.96;                 // gap width, um
    double n_interface = 3.155;      // index used for the facet Fresnel coefficients
    double series_tolerance = 1e-8;  // stop once r^(2p) drops below this
    int p_max = 64;
    PhaseConvention phase = PhaseConvention::Profile;

    void validate() const
    {
        require(d >= 0.0, ErrorKind::NegativeDistance, "gap width must be >= 0");
        require(n_interface >= 1.0, ErrorKind::InvalidIndex, "n_interface must be >= 1");
        require(series_tolerance > 0.0 && series_tolerance < 1.0, ErrorKind::InvalidArgument,
                "series_tolerance must lie in (0, 1)");
        require(p_max >= 1, ErrorKind::InvalidArgument, "p_max must be >= 1");
    }
};

/// Normal-incidence facet coefficients for light leaving the guide.
/// r is the guide-side amplitude reflection; the air-side one is -r.
/// Amplitudes are power-normalized, so t = t_back = sqrt(1 - r^2).
struct FresnelCoefficients {
    double r = 0.0;
    double t = 1.0;
    double t_back = 1.0;
};

inline FresnelCoefficients fresnel_interface(double n)
{
    require(n >= 1.0, ErrorKind::InvalidIndex, "interface index must be >= 1");
    FresnelCoefficients c;
    c.r = (n - 1.0) / (n + 1.0);
    c.t = std::sqrt(1.0 - c.r * c.r);
    c.t_back = c.t;
    return c;
}

/// Supplies the overlap factor Q(s) between the waveguide eigenmode and its
/// free-space propagated copy after a distance s.
class GapOverlapModel {
public:
    /// Diffracting model built from a solved mode (propagated in index 1).
    static GapOverlapModel from_mode(const SampledField& mode, PhaseConvention phase = PhaseConvention::Profile)
    {
        SampledField launched = mode;
        launched.medium_index = 1.0;
        GapOverlapModel m;
        m.spectrum_ = std::make_shared<const SelfOverlapSpectrum>(launched);
        m.k_ = m.spectrum_->k();
        m.wavelength_ = mode.wavelength;
        m.phase_ = phase;
        return m;
    }

    static GapOverlapModel from_mode(const ModeSolution& mode, PhaseConvention phase = PhaseConvention::Profile)
    {
        return from_mode(mode.field, phase);
    }

    /// No diffraction: every overlap has unit modulus (planar Fabry-Perot limit).
    static GapOverlapModel planar(double wavelength_nm)
    {
        GapOverlapModel m;
        m.k_ = wavenumber(wavelength_nm);
        m.wavelength_ = wavelength_nm;
        return m;
    }

    [[nodiscard]] complex factor(double s) const
    {
        if (!spectrum_) return std::polar(1.0, k_ * s);
        const complex q = spectrum_->at(s);
        if (phase_ == PhaseConvention::Full) return q;
        return std::polar(std::abs(q), k_ * s);
    }

    [[nodiscard]] double k() const { return k_; }
    [[nodiscard]] double wavelength() const { return wavelength_; }
    [[nodiscard]] bool diffracting() const { return static_cast<bool>(spectrum_); }
    [[nodiscard]] PhaseConvention phase() const { return phase_; }

private:
    GapOverlapModel() = default;

    std::shared_ptr<const SelfOverlapSpectrum> spectrum_;
    double k_ = 0.0;
    double wavelength_ = 0.0;
    PhaseConvention phase_ = PhaseConvention::Profile;
};

struct GapResult {
    double R = 0.0;
    double T = 0.0;
    double loss = 0.0;
    complex reflection{};    // E_r / E_i, into the incident-side mode
    complex transmission{};  // E_t / E_i, into the far-side mode
    std::vector<complex> q_plus;   // Q_p+ actually used (distance (2p+1) d)
    std::vector<complex> q_minus;  // Q_p- actually used (distance 2(p+1) d)
};

namespace detail {

/// Number of series terms p = 0 .. n-1 the configuration asks for.
inline int series_terms(double r, const GapConfig& cfg)
{
    int p = 1;
    for (double w = r * r; w >= cfg.series_tolerance; w *= r * r, ++p) {
        if (p >= cfg.p_max) {
            fail(ErrorKind::SeriesNotConverged, "term weight " + std::to_string(w) + " still above tolerance at p_max = " +
                                                    std::to_string(cfg.p_max));
        }
    }
    return p;
}

} // namespace detail

/// Multiple-reflection gap model:
///   E_t / E_i = t t' sum_p Q_p+ r^(2p)
///   E_r / E_i = r - t t' sum_p Q_p- r^(2p+1)
/// with Q_p+ at distance (2p+1) d and Q_p- at 2(p+1) d.
inline GapResult gap_scattering(const GapOverlapModel& model, const GapConfig& cfg)
{
    cfg.validate();
    const auto f = fresnel_interface(cfg.n_interface);
    const double tt = f.t * f.t_back;
    const int terms = detail::series_terms(f.r, cfg);

    GapResult out;
    out.q_plus.reserve(static_cast<std::size_t>(terms));
    out.q_minus.reserve(static_cast<std::size_t>(terms));
    complex sum_t{};
    complex sum_r{};
    double r2p = 1.0;
    for (int p = 0; p < terms; ++p, r2p *= f.r * f.r) {
        const complex qp = model.factor((2.0 * p + 1.0) * cfg.d);
        const complex qm = model.factor(2.0 * (p + 1.0) * cfg.d);
        out.q_plus.push_back(qp);
        out.q_minus.push_back(qm);
        sum_t += qp * r2p;
        sum_r += qm * (r2p * f.r);
    }
    out.transmission = tt * sum_t;
    out.reflection = f.r - tt * sum_r;
    out.R = std::norm(out.reflection);
    out.T = std::norm(out.transmission);
    out.loss = 1.0 - out.R - out.T;
    return out;
}

inline GapResult gap_scattering(const ModeSolution& mode, const GapConfig& cfg)
{
    return gap_scattering(GapOverlapModel::from_mode(mode, cfg.phase), cfg);
}

struct LossPoint {
    double d = 0.0;
    double R = 0.0;
    double T = 0.0;
    double loss = 0.0;
};

/// gap_scattering on a uniform grid of widths. A degenerate range
/// (d_min == d_max) yields one row only when allow_single is set.
inline std::vector<LossPoint> loss_spectrum(const GapOverlapModel& model, double d_min, double d_max, int steps,
                                            GapConfig cfg = {}, bool allow_single = false)
{
    require(d_min >= 0.0, ErrorKind::NegativeDistance, "d_min must be >= 0");
    std::vector<LossPoint> rows;
    if (d_min == d_max && allow_single) {
        cfg.d = d_min;
        const auto g = gap_scattering(model, cfg);
        rows.push_back({d_min, g.R, g.T, g.loss});
        return rows;
    }
    require(d_min < d_max, ErrorKind::InvalidArgument, "loss spectrum needs d_min < d_max");
    require(steps >= 2, ErrorKind::InvalidArgument, "loss spectrum needs at least 2 steps");
    rows.reserve(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        cfg.d = d_min + (d_max - d_min) * i / (steps - 1);
        const auto g = gap_scattering(model, cfg);
        rows.push_back({cfg.d, g.R, g.T, g.loss});
    }
    return rows;
}

inline std::vector<LossPoint> loss_spectrum(const ModeSolution& mode, double d_min, double d_max, int steps,
                                            const GapConfig& cfg = {}, bool allow_single = false)
{
    return loss_spectrum(GapOverlapModel::from_mode(mode, cfg.phase), d_min, d_max, steps, cfg, allow_single);
}

/// Amplitude returned into the left guide by the gap followed by a right arm
/// closed with a perfect mirror. arm_phase is the right arm's round-trip
/// phase. Summing the gap-mirror bounces gives
///   rho + tau^2 e^{i phi} / (1 - rho e^{i phi}).
inline complex composite_reflection(const GapResult& gap, double arm_phase)
{
    const complex e = std::polar(1.0, arm_phase);
    return gap.reflection + gap.transmission * gap.transmission * e / (1.0 - gap.reflection * e);
}

inline double composite_round_trip(const GapResult& gap, double arm_phase)
{
    return std::abs(composite_reflection(gap, arm_phase));
}

inline double composite_round_trip(const GapOverlapModel& model, const GapConfig& cfg, double arm_phase)
{
    return composite_round_trip(gap_scattering(model, cfg), arm_phase);
}

inline double composite_round_trip(const ModeSolution& mode, const GapConfig& cfg, double arm_phase)
{
    return composite_round_trip(gap_scattering(mode, cfg), arm_phase);
}

struct PhasePoint {
    double phase = 0.0;
    double r_rt = 0.0;
};

/// r_rt on `steps` equally spaced arm phases in [0, 2 pi).
inline std::vector<PhasePoint> arm_phase_scan(const GapResult& gap, int steps)
{
    require(steps >= 2, ErrorKind::InvalidArgument, "phase scan needs at least 2 steps");
    std::vector<PhasePoint> pts(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        const double phi = 2.0 * constants::pi * i / steps;
        pts[static_cast<std::size_t>(i)] = {phi, composite_round_trip(gap, phi)};
    }
    return pts;
}

struct ArmPhaseExtrema {
    double constructive_phase = 0.0;  // r_rt minimum: in-gap fields add up
    double r_rt_min = 0.0;
    double destructive_phase = 0.0;   // r_rt maximum
    double r_rt_max = 0.0;
};

/// Locates the r_rt extrema over the arm phase: coarse scan, then
/// golden-section refinement inside the bracketing scan cells.
inline ArmPhaseExtrema arm_phase_extrema(const GapResult& gap, int coarse_steps = 720)
{
    const auto pts = arm_phase_scan(gap, coarse_steps);
    const double h = 2.0 * constants::pi / coarse_steps;
    auto refine = [&](double centre, double sign) {
        double a = centre - h;
        double b = centre + h;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        auto f = [&](double x) { return sign * composite_round_trip(gap, x); };
        double c = b - g * (b - a);
        double d = a + g * (b - a);
        for (int i = 0; i < 80; ++i) {
            if (f(c) < f(d)) {
                b = d;
            } else {
                a = c;
            }
            c = b - g * (b - a);
            d = a + g * (b - a);
        }
        double x = std::fmod(0.5 * (a + b), 2.0 * constants::pi);
        if (x < 0) x += 2.0 * constants::pi;
        return x;
    };
    auto lo = std::min_element(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.r_rt < b.r_rt; });
    auto hi = std::max_element(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.r_rt < b.r_rt; });
    ArmPhaseExtrema e;
    e.constructive_phase = refine(lo->phase, 1.0);
    e.r_rt_min = composite_round_trip(gap, e.constructive_phase);
    e.destructive_phase = refine(hi->phase, -1.0);
    e.r_rt_max = composite_round_trip(gap, e.destructive_phase);
    return e;
}

/// Peak standing-wave E-field inside the gap over the peak standing-wave
/// E-field in the mirror-side guide, for the composite setup at arm_phase.
///
/// Amplitudes are mode-projected: a wave that has travelled s through the
/// gap since leaving a facet contributes Q(s) in units of the guided mode.
/// Power-normalized amplitudes are turned into E-field by 1/sqrt(index).
inline double field_enhancement(const GapOverlapModel& model, const GapConfig& cfg, double arm_phase,
                                int z_samples = 201)
{
    require(z_samples >= 2, ErrorKind::InvalidArgument, "need at least 2 samples across the gap");
    const auto gap = gap_scattering(model, cfg);
    const auto f = fresnel_interface(cfg.n_interface);
    const int terms = static_cast<int>(gap.q_plus.size());
    const complex e = std::polar(1.0, arm_phase);
    // Mode amplitude leaving the gap to the right (b) and returning from the mirror (c).
    const complex b = gap.transmission / (1.0 - gap.reflection * e);
    const complex c = b * e;
    const double d = cfg.d;

    double peak = 0.0;
    for (int iz = 0; iz < z_samples; ++iz) {
        const double z = d * iz / (z_samples - 1);
        complex field{};
        double r2p = 1.0;
        for (int p = 0; p < terms; ++p, r2p *= f.r * f.r) {
            const double r2p1 = r2p * f.r;
            // Light entering from the left facet: forward after 2p reflections, backward after 2p+1.
            field += f.t * (r2p * model.factor(2.0 * p * d + z) - r2p1 * model.factor((2.0 * p + 2.0) * d - z));
            // Light entering from the right facet with amplitude c, mirror image.
            field += c * f.t *
                     (r2p * model.factor(2.0 * p * d + (d - z)) - r2p1 * model.factor((2.0 * p + 1.0) * d + z));
        }
        peak = std::max(peak, std::abs(field));
    }
    const double guide_peak = std::abs(b) + std::abs(c);
    require(guide_peak > 0.0, ErrorKind::ZeroField, "no field in the mirror-side guide");
    return std::sqrt(cfg.n_interface) * peak / guide_peak;
}

inline double field_enhancement(const ModeSolution& mode, const GapConfig& cfg, double arm_phase,
                                int z_samples = 201)
{
    return field_enhancement(GapOverlapModel::from_mode(mode, cfg.phase), cfg, arm_phase, z_samples);
}

} // namespace gapcavity
