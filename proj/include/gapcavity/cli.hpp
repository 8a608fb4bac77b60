#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "cqed.hpp"
#include "error.hpp"
#include "fit.hpp"
#include "gap.hpp"
#include "io.hpp"
#include "trap.hpp"
#include "waveguide.hpp"

namespace gapcavity::cli {

// Exit statuses: 0 ok, 2 input validation, 3 no guided mode, 4 convergence, 5 fit failure.
enum ExitCode : int { Ok = 0, Validation = 2, NoMode = 3, Convergence = 4, FitFailure = 5 };

inline int exit_code_for(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::NoGuidedMode: return NoMode;
    case ErrorKind::SeriesNotConverged: return Convergence;
    case ErrorKind::FitDiverged:
    case ErrorKind::RankDeficient: return FitFailure;
    default: return Validation;
    }
}

/// Runs `body`, mapping library errors to exit statuses with a one-line message on `err`.
template <class Fn>
int guarded(std::ostream& err, Fn&& body)
{
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return Validation;
    }
}

struct ModeArgs {
    std::string config_path;
    std::string out_dir = ".";
};

inline int cmd_mode(const ModeArgs& a, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const auto cfg = load_project_config(a.config_path);
        const auto mode = solve_fundamental_mode(cfg.waveguide, cfg.grid);
        const auto path = std::filesystem::path(a.out_dir) / "mode_field.csv";
        io::write_atomic(path, io::field_csv(mode.field));
        out << "n_eff=" << io::fmt(mode.n_eff) << '\n'
            << "mode_area_um2=" << io::fmt(mode.mode_area) << '\n'
            << "iterations=" << mode.iterations << '\n'
            << "field_csv=mode_field.csv\n";
        return static_cast<int>(Ok);
    });
}

struct GapScanArgs {
    std::string config_path;
    double d_min = 0.3;
    double d_max = 3.0;
    int steps = 271;
    bool phase_scan = false;
    std::string out_dir = ".";
};

/// Interior local maxima of the loss curve.
inline std::vector<double> loss_maxima(const std::vector<LossPoint>& rows)
{
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        if (rows[i].loss > rows[i - 1].loss && rows[i].loss >= rows[i + 1].loss) out.push_back(rows[i].d);
    }
    return out;
}

inline int cmd_gap_scan(const GapScanArgs& a, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        require(a.d_min >= 0.0, ErrorKind::InvalidArgument, "d_min must be >= 0");
        require(a.d_min <= a.d_max, ErrorKind::InvalidArgument, "d_min must not exceed d_max");
        require(a.steps >= 2 || a.d_min == a.d_max, ErrorKind::InvalidArgument, "steps must be >= 2");
        const auto cfg = load_project_config(a.config_path);
        const auto mode = solve_fundamental_mode(cfg.waveguide, cfg.grid);
        const auto model = GapOverlapModel::from_mode(mode, cfg.gap.phase);
        const auto rows = loss_spectrum(model, a.d_min, a.d_max, a.steps, cfg.gap, true);

        std::string phase_text;
        ArmPhaseExtrema ext;
        if (a.phase_scan) {
            const auto gap = gap_scattering(model, cfg.gap);
            phase_text = io::phase_csv(arm_phase_scan(gap, cfg.arm_phase_steps));
            ext = arm_phase_extrema(gap, cfg.arm_phase_steps);
        }

        const auto dir = std::filesystem::path(a.out_dir);
        io::write_atomic(dir / "gap_scan.csv", io::loss_csv(rows));
        if (a.phase_scan) io::write_atomic(dir / "phase_scan.csv", phase_text);

        out << "rows=" << rows.size() << '\n';
        out << "loss_maxima_um=";
        const auto peaks = loss_maxima(rows);
        for (std::size_t i = 0; i < peaks.size(); ++i) out << (i ? "," : "") << io::fmt(peaks[i]);
        out << '\n' << "gap_csv=gap_scan.csv\n";
        if (a.phase_scan) {
            out << "d_um=" << io::fmt(cfg.gap.d) << '\n'
                << "r_rt_min=" << io::fmt(ext.r_rt_min) << '\n'
                << "constructive_phase_rad=" << io::fmt(ext.constructive_phase) << '\n'
                << "r_rt_max=" << io::fmt(ext.r_rt_max) << '\n'
                << "destructive_phase_rad=" << io::fmt(ext.destructive_phase) << '\n'
                << "phase_csv=phase_scan.csv\n";
        }
        return static_cast<int>(Ok);
    });
}

struct FitArgs {
    std::string data_path;
};

inline int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const auto data = io::load_finesse_csv(a.data_path);
        const auto r = fit_losses(data);
        out << "Finesse fit to F(l) = pi sqrt(g)/(1-g), g = R exp(-alpha l)\n"
            << "  points: " << data.size() << (r.weighted ? " (weighted)" : " (unweighted)") << '\n'
            << "  iterations: " << r.iterations << '\n'
            << "  residual norm: " << io::fmt(r.residual_norm) << '\n'
            << "R_fit=" << io::fmt(r.R_fit) << '\n'
            << "alpha_fit_per_cm=" << io::fmt(r.alpha_fit) << '\n'
            << "sigma_R=" << io::fmt(r.sigma_R) << '\n'
            << "sigma_alpha=" << io::fmt(r.sigma_alpha) << '\n';
        return static_cast<int>(Ok);
    });
}

struct BudgetArgs {
    std::string config_path;
    bool no_gap = false;
};

inline int cmd_budget(const BudgetArgs& a, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const auto cfg = load_project_config(a.config_path);
        CavitySpec spec = cfg.budget.cavity;
        spec.n_group = cfg.n_group();

        double area = 0.0;
        std::optional<ModeSolution> mode;
        if (cfg.budget.mode_area_um2) {
            area = *cfg.budget.mode_area_um2;
        } else {
            mode = solve_fundamental_mode(cfg.waveguide, cfg.grid);
            area = mode->mode_area;
        }

        std::optional<double> gap_rt;
        if (!a.no_gap) {
            if (cfg.budget.gap_round_trip) {
                gap_rt = cfg.budget.gap_round_trip;
            } else {
                if (!mode) mode = solve_fundamental_mode(cfg.waveguide, cfg.grid);
                const auto gap = gap_scattering(GapOverlapModel::from_mode(*mode, cfg.gap.phase), cfg.gap);
                gap_rt = arm_phase_extrema(gap, cfg.arm_phase_steps).r_rt_min;
            }
            spec.gap_round_trip_amplitude = gap_rt;
        }

        const auto b = full_budget(area, spec, cfg.atom, cfg.budget.enhancement);
        out << "length_um=" << io::fmt(spec.length) << '\n'
            << "n_group=" << io::fmt(spec.n_group) << '\n'
            << "alpha_per_cm=" << io::fmt(spec.alpha) << '\n'
            << "mode_area_um2=" << io::fmt(area) << '\n'
            << "gap_round_trip=" << (gap_rt ? io::fmt(*gap_rt) : std::string("none")) << '\n'
            << "finesse_intr=" << io::fmt(b.finesse_intr) << '\n'
            << "fsr_GHz=" << io::fmt(b.fsr_GHz) << '\n'
            << "g_over_2pi_MHz=" << io::fmt(b.g_over_2pi) << '\n'
            << "kappa_intr_over_2pi_GHz=" << io::fmt(b.kappa_intr_over_2pi) << '\n'
            << "kappa_T_over_2pi_GHz=" << io::fmt(b.kappa_T_over_2pi) << '\n'
            << "kappa_over_2pi_GHz=" << io::fmt(b.kappa_total_over_2pi) << '\n'
            << "gamma_over_2pi_MHz=" << io::fmt(cfg.atom.gamma_half) << '\n'
            << "enhancement=" << io::fmt(b.enhancement) << '\n'
            << "C=" << io::fmt(b.cooperativity) << '\n'
            << "lossless=" << io::fmt(b.lossless) << '\n';
        for (int pairs : cfg.mirror.pair_counts) {
            const auto stack = quarter_wave_stack(pairs, cfg.mirror.n_low, cfg.mirror.n_high, cfg.waveguide.wavelength,
                                                  cfg.gap.n_interface, cfg.mirror.n_exit, cfg.mirror.low_first);
            out << "mirror_R" << pairs << "=" << io::fmt(stack_reflectivity(stack, cfg.waveguide.wavelength)) << '\n';
        }
        return static_cast<int>(Ok);
    });
}

struct TrapArgs {
    std::string config_path;
    std::string out_dir = ".";
};

inline int cmd_trap(const TrapArgs& a, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        const auto cfg = load_project_config(a.config_path);
        const auto tc = cfg.trap_config();
        const auto prof = potential_profile(tc);
        const auto an = trap_analysis(tc);
        io::write_atomic(std::filesystem::path(a.out_dir) / "trap_profile.csv", io::trap_csv(prof));
        out << "gap_width_um=" << io::fmt(tc.gap_width) << '\n'
            << "has_minimum=" << io::fmt(an.has_minimum) << '\n'
            << "barrier_uK=" << io::fmt(an.barrier_height_uK) << '\n'
            << "min_position_um=" << io::fmt(an.min_position) << '\n'
            << "profile_csv=trap_profile.csv\n";
        return static_cast<int>(Ok);
    });
}

} // namespace gapcavity::cli
