#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cavity.hpp"
#include "error.hpp"

namespace gapcavity {

struct FinessePoint {
    double length = 0.0;  // um
    double finesse = 0.0;
    std::optional<double> sigma;
};

struct FitResult {
    double R_fit = 0.0;
    double alpha_fit = 0.0;  // 1/cm
    double sigma_R = 0.0;
    double sigma_alpha = 0.0;
    std::array<std::array<double, 2>, 2> covariance{};
    double residual_norm = 0.0;
    int iterations = 0;
    bool weighted = false;
};

struct FitOptions {
    int max_iterations = 200;
    double step_tolerance = 1e-10;
    std::optional<double> initial_R;
    std::optional<double> initial_alpha;
};

namespace detail {

/// Finesse of a symmetric guide cavity and its gradient w.r.t. (R, alpha).
struct FinesseModel {
    double value;
    double d_R;
    double d_alpha;
};

inline FinesseModel finesse_model(double R, double alpha, double length_um)
{
    const double l = length_um * um_to_cm;
    const double att = std::exp(-alpha * l);
    const double g = R * att;
    const double sg = std::sqrt(g);
    const double f = constants::pi * sg / (1.0 - g);
    const double df_dg = constants::pi * (1.0 + g) / (2.0 * sg * (1.0 - g) * (1.0 - g));
    return {f, df_dg * att, df_dg * (-l * g)};
}

} // namespace detail

/// Weighted Levenberg-Marquardt fit of F(l) = pi sqrt(g) / (1 - g),
/// g = R exp(-alpha l), to finesse-versus-length data.
/// With sigmas supplied the covariance is absolute; without, it is scaled by
/// the residual variance.
inline FitResult fit_losses(const std::vector<FinessePoint>& data, const FitOptions& opt = {})
{
    require(data.size() >= 3, ErrorKind::InsufficientData, "fit needs at least 3 points, got " + std::to_string(data.size()));
    std::set<double> lengths;
    const bool weighted = data.front().sigma.has_value();
    for (const auto& p : data) {
        require(p.length > 0.0 && p.finesse > 0.0, ErrorKind::InvalidArgument, "lengths and finesses must be positive");
        require(p.sigma.has_value() == weighted, ErrorKind::InvalidArgument, "sigma must be given for all rows or none");
        if (p.sigma) require(*p.sigma > 0.0, ErrorKind::InvalidArgument, "sigma must be positive");
        lengths.insert(p.length);
    }
    require(lengths.size() >= 2, ErrorKind::InsufficientData, "fit needs at least 2 distinct lengths");

    // Start: R from the best point with alpha = 0, alpha from the two extreme lengths.
    const auto best = std::max_element(data.begin(), data.end(),
                                       [](const auto& a, const auto& b) { return a.finesse < b.finesse; });
    const auto shortest = std::min_element(data.begin(), data.end(),
                                           [](const auto& a, const auto& b) { return a.length < b.length; });
    const auto longest = std::max_element(data.begin(), data.end(),
                                          [](const auto& a, const auto& b) { return a.length < b.length; });
    double R = opt.initial_R.value_or(round_trip_from_finesse(best->finesse));
    double alpha = opt.initial_alpha.value_or(
        std::log(round_trip_from_finesse(shortest->finesse) / round_trip_from_finesse(longest->finesse)) /
        ((longest->length - shortest->length) * um_to_cm));
    R = std::clamp(R, 1e-6, 1.0 - 1e-9);
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) alpha = 0.0;

    auto cost_at = [&](double r_, double a_) {
        double c = 0.0;
        for (const auto& p : data) {
            const double w = p.sigma ? 1.0 / *p.sigma : 1.0;
            const double res = (p.finesse - detail::finesse_model(r_, a_, p.length).value) * w;
            c += res * res;
        }
        return c;
    };

    // Steps are projected back onto 0 < R < 1, alpha >= 0 so a parameter
    // pinned at a bound does not stall the others.
    double lambda = 1e-3;
    double cost = cost_at(R, alpha);
    FitResult out;
    out.weighted = weighted;
    bool converged = false;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        double a11 = 0, a12 = 0, a22 = 0, g1 = 0, g2 = 0;
        for (const auto& p : data) {
            const double w = p.sigma ? 1.0 / *p.sigma : 1.0;
            const auto m = detail::finesse_model(R, alpha, p.length);
            const double res = (p.finesse - m.value) * w;
            const double j1 = m.d_R * w;
            const double j2 = m.d_alpha * w;
            a11 += j1 * j1;
            a12 += j1 * j2;
            a22 += j2 * j2;
            g1 += j1 * res;
            g2 += j2 * res;
        }
        out.iterations = it;
        bool accepted = false;
        while (lambda < 1e20) {
            const double b11 = a11 * (1.0 + lambda);
            const double b22 = a22 * (1.0 + lambda);
            const double det = b11 * b22 - a12 * a12;
            const double R_new = std::clamp(R + (b22 * g1 - a12 * g2) / det, 1e-12, 1.0 - 1e-12);
            const double alpha_new = std::max(alpha + (b11 * g2 - a12 * g1) / det, 0.0);
            const double c_new = cost_at(R_new, alpha_new);
            if (std::isfinite(c_new) && c_new <= cost) {
                const bool small = std::abs(R_new - R) <= opt.step_tolerance * std::max(R, 1e-12) &&
                                   std::abs(alpha_new - alpha) <= opt.step_tolerance * std::max(alpha, 1e-12);
                R = R_new;
                alpha = alpha_new;
                cost = c_new;
                lambda = std::max(lambda * 0.1, 1e-12);
                accepted = true;
                converged = small || cost == 0.0;
                break;
            }
            lambda *= 10.0;
        }
        // No downhill step at any damping: already at the minimum to working precision.
        if (!accepted) converged = true;
        if (converged) break;
    }
    if (!converged) fail(ErrorKind::FitDiverged, "fit did not converge within " + std::to_string(opt.max_iterations) + " iterations");

    // Linearized covariance at the optimum.
    double a11 = 0, a12 = 0, a22 = 0;
    for (const auto& p : data) {
        const double w = p.sigma ? 1.0 / *p.sigma : 1.0;
        const auto m = detail::finesse_model(R, alpha, p.length);
        a11 += m.d_R * m.d_R * w * w;
        a12 += m.d_R * m.d_alpha * w * w;
        a22 += m.d_alpha * m.d_alpha * w * w;
    }
    const double det = a11 * a22 - a12 * a12;
    require(det > 1e-12 * a11 * a22, ErrorKind::RankDeficient, "Jacobian is rank-deficient at the optimum");
    const std::size_t dof = data.size() - 2;
    const double scale = weighted ? 1.0 : (dof > 0 ? cost / static_cast<double>(dof) : 0.0);
    out.covariance = {{{a22 / det * scale, -a12 / det * scale}, {-a12 / det * scale, a11 / det * scale}}};
    out.R_fit = R;
    out.alpha_fit = alpha;
    out.sigma_R = std::sqrt(out.covariance[0][0]);
    out.sigma_alpha = std::sqrt(out.covariance[1][1]);
    out.residual_norm = std::sqrt(cost);
    return out;
}

} // namespace gapcavity
