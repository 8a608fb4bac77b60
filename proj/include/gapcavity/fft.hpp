#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <span>

#include <fftw3.h>

#include "error.hpp"

namespace gapcavity::detail {

// The FFTW planner is not re-entrant; plan execution is.
inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

/// Owns an aligned scratch buffer and a forward/backward plan pair for one
/// nx-by-ny shape. Not shareable across threads; create one per worker.
class Fft2d {
public:
    Fft2d(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny)
    {
        buffer_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nx * ny));
        require(buffer_ != nullptr, ErrorKind::InvalidArgument, "FFT buffer allocation failed");
        std::lock_guard lock(fftw_planner_mutex());
        forward_ = fftw_plan_dft_2d(static_cast<int>(nx), static_cast<int>(ny), buffer_, buffer_, FFTW_FORWARD,
                                    FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_2d(static_cast<int>(nx), static_cast<int>(ny), buffer_, buffer_, FFTW_BACKWARD,
                                     FFTW_ESTIMATE);
    }

    Fft2d(const Fft2d&) = delete;
    Fft2d& operator=(const Fft2d&) = delete;

    ~Fft2d()
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(buffer_);
    }

    [[nodiscard]] std::span<std::complex<double>> data()
    {
        return {reinterpret_cast<std::complex<double>*>(buffer_), nx_ * ny_};
    }

    void forward() { fftw_execute(forward_); }

    /// Unnormalized inverse; callers scale by 1/(nx*ny).
    void backward() { fftw_execute(backward_); }

    [[nodiscard]] std::size_t nx() const { return nx_; }
    [[nodiscard]] std::size_t ny() const { return ny_; }

private:
    std::size_t nx_;
    std::size_t ny_;
    fftw_complex* buffer_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

/// Angular frequency (rad/um) of DFT bin i for n samples at spacing d.
inline double fft_wavenumber(std::size_t i, std::size_t n, double d)
{
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    auto m = static_cast<std::ptrdiff_t>(i);
    if (m >= half) m -= static_cast<std::ptrdiff_t>(n);
    return 2.0 * std::numbers::pi * static_cast<double>(m) / (static_cast<double>(n) * d);
}

} // namespace gapcavity::detail
