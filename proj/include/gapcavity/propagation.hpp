#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "constants.hpp"
#include "error.hpp"
#include "fft.hpp"
#include "field.hpp"

namespace gapcavity {

/// Wavenumber in rad/um for a vacuum wavelength in nm.
inline double wavenumber(double wavelength_nm, double medium_index = 1.0)
{
    return 2.0 * constants::pi * medium_index / (wavelength_nm * 1e-3);
}

/// Scalar angular-spectrum propagator bound to one grid and medium.
/// Evanescent plane-wave components are discarded for any d > 0.
class AngularSpectrumPropagator {
public:
    explicit AngularSpectrumPropagator(const SampledField& like)
        : nx_(like.nx), ny_(like.ny), dx_(like.dx), dy_(like.dy), wavelength_(like.wavelength),
          medium_(like.medium_index), fft_(like.nx, like.ny), kz_(like.nx * like.ny)
    {
        const double k = wavenumber(wavelength_, medium_);
        for (std::size_t ix = 0; ix < nx_; ++ix) {
            const double kx = detail::fft_wavenumber(ix, nx_, dx_);
            for (std::size_t iy = 0; iy < ny_; ++iy) {
                const double ky = detail::fft_wavenumber(iy, ny_, dy_);
                const double kz2 = k * k - kx * kx - ky * ky;
                kz_[ix * ny_ + iy] = kz2 > 0.0 ? std::sqrt(kz2) : -1.0;
            }
        }
    }

    [[nodiscard]] SampledField propagate(const SampledField& field, double d)
    {
        require(d >= 0.0, ErrorKind::NegativeDistance, "propagation distance must be >= 0");
        require(field.nx == nx_ && field.ny == ny_ && field.dx == dx_ && field.dy == dy_ &&
                    field.wavelength == wavelength_ && field.medium_index == medium_,
                ErrorKind::GridMismatch, "field does not match the propagator grid");
        if (d == 0.0) return field;

        auto buf = fft_.data();
        std::copy(field.amplitudes.begin(), field.amplitudes.end(), buf.begin());
        fft_.forward();
        const double scale = 1.0 / static_cast<double>(nx_ * ny_);
        for (std::size_t i = 0; i < buf.size(); ++i) {
            const double kz = kz_[i];
            buf[i] = kz < 0.0 ? complex{} : buf[i] * std::polar(scale, kz * d);
        }
        fft_.backward();

        SampledField out = field;
        std::copy(buf.begin(), buf.end(), out.amplitudes.begin());
        return out;
    }

private:
    std::size_t nx_, ny_;
    double dx_, dy_, wavelength_, medium_;
    detail::Fft2d fft_;
    std::vector<double> kz_;  // rad/um, -1 marks evanescent
};

/// One-shot angular-spectrum propagation over distance d (um).
inline SampledField propagate_free_space(const SampledField& field, double d)
{
    require(d >= 0.0, ErrorKind::NegativeDistance, "propagation distance must be >= 0");
    if (d == 0.0) return field;
    AngularSpectrumPropagator prop(field);
    return prop.propagate(field, d);
}

/// Power-normalized inner product <a, b> / (|a| |b|), conjugate-linear in a.
inline complex overlap(const SampledField& a, const SampledField& b)
{
    require(a.same_grid(b), ErrorKind::GridMismatch, "overlap requires identical grids and wavelengths");
    complex inner{};
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        inner += std::conj(a.amplitudes[i]) * b.amplitudes[i];
        na += std::norm(a.amplitudes[i]);
        nb += std::norm(b.amplitudes[i]);
    }
    require(na > 0.0 && nb > 0.0, ErrorKind::ZeroField, "overlap of a zero field");
    return inner / std::sqrt(na * nb);
}

/// Plane-wave power spectrum of a fixed field, giving
/// overlap(f, propagate(f, s)) for any s from a single transform.
class SelfOverlapSpectrum {
public:
    explicit SelfOverlapSpectrum(const SampledField& field)
    {
        detail::Fft2d fft(field.nx, field.ny);
        auto buf = fft.data();
        std::copy(field.amplitudes.begin(), field.amplitudes.end(), buf.begin());
        fft.forward();
        const double k = wavenumber(field.wavelength, field.medium_index);
        double total = 0.0;
        double peak = 0.0;
        for (const auto& c : buf) peak = std::max(peak, std::norm(c));
        require(peak > 0.0, ErrorKind::ZeroField, "spectrum of a zero field");
        for (std::size_t ix = 0; ix < field.nx; ++ix) {
            const double kx = detail::fft_wavenumber(ix, field.nx, field.dx);
            for (std::size_t iy = 0; iy < field.ny; ++iy) {
                const double ky = detail::fft_wavenumber(iy, field.ny, field.dy);
                const double w = std::norm(buf[ix * field.ny + iy]);
                total += w;
                const double kz2 = k * k - kx * kx - ky * ky;
                if (kz2 <= 0.0 || w == 0.0) continue;
                // Components below 1e-30 of the peak cannot move the sum at double precision.
                propagating_ += w;
                if (w < 1e-30 * peak) continue;
                weights_.push_back(w);
                kz_.push_back(std::sqrt(kz2));
            }
        }
        total_ = total;
        k_ = k;
    }

    /// overlap(f, propagate(f, s)); s = 0 returns exactly 1.
    [[nodiscard]] complex at(double s) const
    {
        require(s >= 0.0, ErrorKind::NegativeDistance, "propagation distance must be >= 0");
        if (s == 0.0) return {1.0, 0.0};
        complex sum{};
        for (std::size_t i = 0; i < weights_.size(); ++i) sum += weights_[i] * std::polar(1.0, kz_[i] * s);
        return sum / std::sqrt(total_ * propagating_);
    }

    /// Plane-wave wavenumber k = 2 pi n / lambda in rad/um.
    [[nodiscard]] double k() const { return k_; }

private:
    std::vector<double> weights_;
    std::vector<double> kz_;
    double total_ = 0.0;
    double propagating_ = 0.0;
    double k_ = 0.0;
};

} // namespace gapcavity
