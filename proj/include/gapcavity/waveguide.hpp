#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "error.hpp"
#include "field.hpp"
#include "propagation.hpp"

namespace gapcavity {

/// Ridge waveguide cross-section. Vertical coordinate y = 0 is the bottom of
/// the core layer; x = 0 is the ridge axis. From the top surface down the
/// stack is: top cladding, core, lower cladding, substrate. The ridge is
/// etched ridge_height deep from the top surface, outside |x| < width / 2.
struct WaveguideGeometry {
    double ridge_width = 4.0;             // um
    double ridge_height = 4.0;            // um, etch depth from the top surface
    double core_thickness = 4.5;          // um
    double top_cladding_thickness = 1.0;  // um
    double cladding_thickness = 4.0;      // um, lower cladding above the substrate
    double n_core = 3.155;
    double n_clad = 3.145;
    double n_exterior = 1.0;
    double n_substrate = 3.145;
    double wavelength = 780.0;  // nm

    [[nodiscard]] double top_surface() const { return core_thickness + top_cladding_thickness; }
    [[nodiscard]] double etch_floor() const { return top_surface() - ridge_height; }

    void validate() const
    {
        require(ridge_width > 0 && ridge_height > 0 && core_thickness > 0 && cladding_thickness > 0,
                ErrorKind::InvalidArgument, "waveguide lengths must be positive");
        require(top_cladding_thickness >= 0, ErrorKind::InvalidArgument, "top cladding thickness must be >= 0");
        require(wavelength > 0, ErrorKind::InvalidArgument, "wavelength must be positive");
        require(n_exterior >= 1.0, ErrorKind::InvalidIndex, "n_exterior must be >= 1");
        require(n_clad >= n_exterior, ErrorKind::InvalidIndex, "n_clad must be >= n_exterior");
        // Equal core and cladding indices are accepted; the solver reports NoGuidedMode.
        require(n_core >= n_clad, ErrorKind::InvalidIndex, "n_core must be >= n_clad");
        require(n_substrate >= 1.0, ErrorKind::InvalidIndex, "n_substrate must be >= 1");
    }

    /// Refractive index at a point (um).
    [[nodiscard]] double index_at(double x, double y) const
    {
        if (y >= top_surface()) return n_exterior;
        if (std::abs(x) >= 0.5 * ridge_width && y >= etch_floor()) return n_exterior;
        if (y >= core_thickness) return n_clad;
        if (y >= 0.0) return n_core;
        if (y >= -cladding_thickness) return n_clad;
        return n_substrate;
    }

    /// Centre of the natural solve window: ridge axis, mid-height of the ridge.
    [[nodiscard]] std::pair<double, double> window_centre() const
    {
        return {0.0, etch_floor() + 0.5 * ridge_height};
    }
};

struct ModeSolution {
    SampledField field;  // unit power; medium_index 1 so it can be launched straight into a gap
    double n_eff = 0.0;
    double mode_area = 0.0;  // um^2
    int iterations = 0;
};

/// Effective area (integral I)^2 / integral I^2 with I = |E|^2, in um^2.
inline double mode_area(const SampledField& field)
{
    double s1 = 0.0;
    double s2 = 0.0;
    for (const auto& a : field.amplitudes) {
        const double i = std::norm(a);
        s1 += i;
        s2 += i * i;
    }
    require(s1 > 0.0, ErrorKind::ZeroField, "mode area of a zero field");
    return s1 * s1 / s2 * field.cell_area();
}

inline double mode_area(const ModeSolution& mode) { return mode_area(mode.field); }

namespace detail {

struct Eigenpair {
    double eigenvalue = 0.0;
    std::vector<double> vector;
    int iterations = 0;
};

/// Largest eigenpair of the 5-point scalar Helmholtz operator
/// L = d2/dx2 + d2/dy2 + k^2 n^2 with Dirichlet walls, by inverse iteration on
/// (shift - L), which is SPD because shift bounds the spectrum from above.
/// nx == 1 drops the x derivative and gives the 1-D slab problem.
inline Eigenpair helmholtz_fundamental(const std::vector<double>& k2n2, std::size_t nx, std::size_t ny, double dx,
                                       double dy, double shift, double tolerance = 1e-10, int max_iterations = 2000)
{
    using Sparse = Eigen::SparseMatrix<double>;
    const auto n = static_cast<Eigen::Index>(nx * ny);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 5);
    const double cx = nx > 1 ? 1.0 / (dx * dx) : 0.0;
    const double cy = 1.0 / (dy * dy);
    auto id = [ny](std::size_t ix, std::size_t iy) { return static_cast<Eigen::Index>(ix * ny + iy); };
    for (std::size_t ix = 0; ix < nx; ++ix) {
        for (std::size_t iy = 0; iy < ny; ++iy) {
            const auto i = id(ix, iy);
            // M = shift - L
            trip.emplace_back(i, i, shift - k2n2[static_cast<std::size_t>(i)] + 2.0 * cx + 2.0 * cy);
            if (ix > 0) trip.emplace_back(i, id(ix - 1, iy), -cx);
            if (ix + 1 < nx) trip.emplace_back(i, id(ix + 1, iy), -cx);
            if (iy > 0) trip.emplace_back(i, id(ix, iy - 1), -cy);
            if (iy + 1 < ny) trip.emplace_back(i, id(ix, iy + 1), -cy);
        }
    }
    Sparse m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());

    Eigen::SimplicialLDLT<Sparse> solver;
    solver.compute(m);
    require(solver.info() == Eigen::Success, ErrorKind::NoGuidedMode, "shifted Helmholtz operator is singular");

    // Start from the index map itself: positive and peaked on the core.
    const double lo = *std::min_element(k2n2.begin(), k2n2.end());
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = k2n2[static_cast<std::size_t>(i)] - lo + 1e-3;
    x.normalize();

    double mu_prev = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iterations; ++it) {
        Eigen::VectorXd y = solver.solve(x);
        // Rayleigh quotient of M at the new iterate.
        const double ynorm = y.norm();
        y /= ynorm;
        const double mu = y.dot(m * y);
        x = std::move(y);
        if (std::abs(mu - mu_prev) <= tolerance * std::abs(shift - mu)) {
            Eigenpair out;
            out.eigenvalue = shift - mu;
            out.vector.assign(x.data(), x.data() + n);
            out.iterations = it;
            return out;
        }
        mu_prev = mu;
    }
    fail(ErrorKind::SeriesNotConverged, "inverse iteration did not converge");
}

} // namespace detail

/// Fundamental guided mode of the scalar transverse Helmholtz equation on the
/// geometry's piecewise-constant index map. Each cell carries the average of
/// n^2 over an 8x8 sub-sampling so interfaces need not align with the grid.
inline ModeSolution solve_fundamental_mode(const WaveguideGeometry& geometry, const GridSpec& grid)
{
    geometry.validate();
    grid.validate();
    require(grid.window_x >= geometry.ridge_width + 8.0 && grid.window_y >= geometry.ridge_height + 8.0,
            ErrorKind::GridTooSmall, "window must cover the ridge plus 4 um on each side");

    SampledField field(grid.nx, grid.ny, grid.dx(), grid.dy(), geometry.wavelength, 1.0);
    const auto [cx, cy] = geometry.window_centre();
    field.x0 += cx;
    field.y0 += cy;

    const double k = wavenumber(geometry.wavelength);
    constexpr int sub = 8;
    std::vector<double> k2n2(field.size());
    double n_max = 0.0;
    for (std::size_t ix = 0; ix < field.nx; ++ix) {
        for (std::size_t iy = 0; iy < field.ny; ++iy) {
            double acc = 0.0;
            for (int a = 0; a < sub; ++a) {
                for (int b = 0; b < sub; ++b) {
                    const double x = field.x(ix) + field.dx * ((a + 0.5) / sub - 0.5);
                    const double y = field.y(iy) + field.dy * ((b + 0.5) / sub - 0.5);
                    const double n = geometry.index_at(x, y);
                    acc += n * n;
                    n_max = std::max(n_max, n);
                }
            }
            k2n2[ix * field.ny + iy] = k * k * acc / (sub * sub);
        }
    }

    // Any eigenvalue of the discrete operator is below k^2 n_max^2; a hair above keeps the shift strict.
    const double shift = k * k * n_max * n_max * (1.0 + 1e-9);
    const auto eig = detail::helmholtz_fundamental(k2n2, field.nx, field.ny, field.dx, field.dy, shift);

    ModeSolution sol;
    sol.iterations = eig.iterations;
    sol.n_eff = eig.eigenvalue > 0.0 ? std::sqrt(eig.eigenvalue) / k : 0.0;
    if (!(sol.n_eff > geometry.n_clad)) {
        fail(ErrorKind::NoGuidedMode, "largest eigenvalue gives n_eff = " + std::to_string(sol.n_eff) +
                                          " <= n_clad = " + std::to_string(geometry.n_clad));
    }
    // Fix the sign so the peak is positive.
    double peak = 0.0;
    for (double v : eig.vector) {
        if (std::abs(v) > std::abs(peak)) peak = v;
    }
    const double sign = peak < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < field.size(); ++i) field.amplitudes[i] = sign * eig.vector[i];
    field.normalize();

    const double edge = field.boundary_ratio();
    if (edge >= 1e-3) {
        fail(ErrorKind::GridTooSmall,
             "mode amplitude at the window boundary is " + std::to_string(edge) + " of the peak");
    }
    sol.mode_area = mode_area(field);
    sol.field = std::move(field);
    return sol;
}

/// Symmetric three-layer slab, used as the 1-D limit of the solver.
struct SlabProfile {
    double thickness = 4.0;  // um
    double n_core = 3.155;
    double n_clad = 3.145;
    double wavelength = 780.0;  // nm
};

/// Effective index of the fundamental slab mode on ny samples across window (um).
inline double solve_slab_mode(const SlabProfile& slab, std::size_t ny, double window)
{
    require(slab.n_core > slab.n_clad && slab.thickness > 0 && slab.wavelength > 0, ErrorKind::InvalidArgument,
            "invalid slab profile");
    require(ny >= 16 && window > slab.thickness, ErrorKind::GridTooSmall, "slab window too small");
    const double k = wavenumber(slab.wavelength);
    const double dy = window / static_cast<double>(ny);
    constexpr int sub = 16;
    std::vector<double> k2n2(ny);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        const double yc = (static_cast<double>(iy) - 0.5 * static_cast<double>(ny - 1)) * dy;
        double acc = 0.0;
        for (int b = 0; b < sub; ++b) {
            const double y = yc + dy * ((b + 0.5) / sub - 0.5);
            const double n = std::abs(y) < 0.5 * slab.thickness ? slab.n_core : slab.n_clad;
            acc += n * n;
        }
        k2n2[iy] = k * k * acc / sub;
    }
    const double shift = k * k * slab.n_core * slab.n_core * (1.0 + 1e-9);
    const auto eig = detail::helmholtz_fundamental(k2n2, 1, ny, dy, dy, shift);
    const double n_eff = std::sqrt(eig.eigenvalue) / k;
    require(n_eff > slab.n_clad, ErrorKind::NoGuidedMode, "slab has no guided mode");
    return n_eff;
}

struct DispersionSample {
    double wavelength = 0.0;  // nm
    double n_eff = 0.0;
};

/// n_g = n - lambda dn/dlambda by central difference about the middle sample.
inline double group_index(std::vector<DispersionSample> samples)
{
    std::sort(samples.begin(), samples.end(),
              [](const auto& a, const auto& b) { return a.wavelength < b.wavelength; });
    samples.erase(std::unique(samples.begin(), samples.end(),
                              [](const auto& a, const auto& b) { return a.wavelength == b.wavelength; }),
                  samples.end());
    require(samples.size() >= 2, ErrorKind::InsufficientSamples, "group index needs two distinct wavelengths");
    for (const auto& s : samples) {
        require(s.wavelength > 0 && s.n_eff > 0, ErrorKind::InvalidArgument, "dispersion samples must be positive");
    }
    const std::size_t m = samples.size() / 2;
    double lambda, n, slope;
    if (samples.size() % 2 == 1) {
        const auto& lo = samples[m - 1];
        const auto& hi = samples[m + 1];
        lambda = samples[m].wavelength;
        n = samples[m].n_eff;
        slope = (hi.n_eff - lo.n_eff) / (hi.wavelength - lo.wavelength);
    } else {
        const auto& lo = samples[m - 1];
        const auto& hi = samples[m];
        lambda = 0.5 * (lo.wavelength + hi.wavelength);
        n = 0.5 * (lo.n_eff + hi.n_eff);
        slope = (hi.n_eff - lo.n_eff) / (hi.wavelength - lo.wavelength);
    }
    return n - lambda * slope;
}

} // namespace gapcavity
