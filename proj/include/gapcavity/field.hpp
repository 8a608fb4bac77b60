#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "error.hpp"

namespace gapcavity {

using complex = std::complex<double>;

/// Transverse sampling window. Counts must be powers of two so the
/// angular-spectrum transforms stay radix-2.
struct GridSpec {
    std::size_t nx = 256;
    std::size_t ny = 256;
    double window_x = 24.0;  // um
    double window_y = 24.0;  // um

    [[nodiscard]] double dx() const { return window_x / static_cast<double>(nx); }
    [[nodiscard]] double dy() const { return window_y / static_cast<double>(ny); }

    void validate() const
    {
        auto pow2 = [](std::size_t n) { return n != 0 && (n & (n - 1)) == 0; };
        require(nx >= 16 && ny >= 16, ErrorKind::InvalidArgument, "grid needs at least 16 samples per axis");
        require(pow2(nx) && pow2(ny), ErrorKind::InvalidArgument, "grid sample counts must be powers of two");
        require(window_x > 0.0 && window_y > 0.0, ErrorKind::InvalidArgument, "grid window must be positive");
    }
};

/// Complex scalar field sampled on a uniform, cell-centred grid.
/// Storage is row-major with x as the slow index: amplitudes[ix * ny + iy].
struct SampledField {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double dx = 0.0;  // um
    double dy = 0.0;  // um
    double x0 = 0.0;  // centre of sample (0, 0), um
    double y0 = 0.0;
    double wavelength = 0.0;  // nm, vacuum
    double medium_index = 1.0;
    std::vector<complex> amplitudes;

    SampledField() = default;

    SampledField(std::size_t nx_, std::size_t ny_, double dx_, double dy_, double wavelength_nm,
                 double medium = 1.0)
        : nx(nx_), ny(ny_), dx(dx_), dy(dy_), wavelength(wavelength_nm), medium_index(medium),
          amplitudes(nx_ * ny_)
    {
        require(nx_ > 0 && ny_ > 0, ErrorKind::InvalidArgument, "field must have samples");
        require(dx_ > 0.0 && dy_ > 0.0, ErrorKind::InvalidArgument, "grid spacing must be positive");
        require(wavelength_nm > 0.0, ErrorKind::InvalidArgument, "wavelength must be positive");
        x0 = -0.5 * dx_ * static_cast<double>(nx_ - 1);
        y0 = -0.5 * dy_ * static_cast<double>(ny_ - 1);
    }

    [[nodiscard]] std::size_t size() const { return amplitudes.size(); }
    [[nodiscard]] double cell_area() const { return dx * dy; }
    [[nodiscard]] double x(std::size_t ix) const { return x0 + dx * static_cast<double>(ix); }
    [[nodiscard]] double y(std::size_t iy) const { return y0 + dy * static_cast<double>(iy); }

    complex& operator()(std::size_t ix, std::size_t iy) { return amplitudes[ix * ny + iy]; }
    const complex& operator()(std::size_t ix, std::size_t iy) const { return amplitudes[ix * ny + iy]; }

    /// Integrated |E|^2 over the window.
    [[nodiscard]] double power() const
    {
        double sum = 0.0;
        for (const auto& a : amplitudes) sum += std::norm(a);
        return sum * cell_area();
    }

    [[nodiscard]] double peak_amplitude() const
    {
        double peak = 0.0;
        for (const auto& a : amplitudes) peak = std::max(peak, std::abs(a));
        return peak;
    }

    /// Largest |E| on the outermost ring of samples relative to the peak.
    [[nodiscard]] double boundary_ratio() const
    {
        const double peak = peak_amplitude();
        if (peak == 0.0) return 0.0;
        double edge = 0.0;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            edge = std::max({edge, std::abs((*this)(ix, 0)), std::abs((*this)(ix, ny - 1))});
        }
        for (std::size_t iy = 0; iy < ny; ++iy) {
            edge = std::max({edge, std::abs((*this)(0, iy)), std::abs((*this)(nx - 1, iy))});
        }
        return edge / peak;
    }

    [[nodiscard]] bool same_grid(const SampledField& other) const
    {
        auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
        return nx == other.nx && ny == other.ny && close(dx, other.dx) && close(dy, other.dy) &&
               close(wavelength, other.wavelength);
    }

    void normalize()
    {
        const double p = power();
        require(p > 0.0 && std::isfinite(p), ErrorKind::ZeroField, "cannot normalize a field with zero power");
        const double s = 1.0 / std::sqrt(p);
        for (auto& a : amplitudes) a *= s;
    }
};

/// Separable Gaussian TEM00 profile with intensity exp(-2 r^2 / w^2) at the waist.
inline SampledField gaussian_field(const GridSpec& grid, double waist_um, double wavelength_nm,
                                   double cx = 0.0, double cy = 0.0)
{
    grid.validate();
    SampledField f(grid.nx, grid.ny, grid.dx(), grid.dy(), wavelength_nm);
    for (std::size_t ix = 0; ix < f.nx; ++ix) {
        for (std::size_t iy = 0; iy < f.ny; ++iy) {
            const double x = f.x(ix) - cx;
            const double y = f.y(iy) - cy;
            f(ix, iy) = std::exp(-(x * x + y * y) / (waist_um * waist_um));
        }
    }
    f.normalize();
    return f;
}

} // namespace gapcavity
