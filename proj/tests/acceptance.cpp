// Acceptance checks, one verdict line per criterion. Tolerances are fixed here.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gapcavity.hpp"
#include "gapcavity/cli.hpp"
#include "gapcavity/fft.hpp"
#include "oracles.hpp"

using namespace gapcavity;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    Criterion(int id_, std::string title_) : id(id_), title(std::move(title_)) {}

    int id;
    std::string title;
    bool ok = true;
    std::vector<std::string> lines;

    void check(bool pass, const std::string& what)
    {
        ok = ok && pass;
        lines.push_back(std::string(pass ? "ok    " : "miss  ") + what);
    }
    void note(const std::string& what) { lines.push_back("info  " + what); }
};

std::string num(double v, int prec = 6)
{
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

SampledField band_limited_field(const GridSpec& g, unsigned seed)
{
    SampledField f(g.nx, g.ny, g.dx(), g.dy(), 780.0);
    detail::Fft2d fft(g.nx, g.ny);
    auto spec = fft.data();
    std::mt19937 rng(seed);
    std::normal_distribution<double> n01;
    const double k = wavenumber(780.0);
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
        for (std::size_t iy = 0; iy < g.ny; ++iy) {
            const double kx = detail::fft_wavenumber(ix, g.nx, g.dx());
            const double ky = detail::fft_wavenumber(iy, g.ny, g.dy());
            const double kt2 = kx * kx + ky * ky;
            spec[ix * g.ny + iy] = kt2 < 0.25 * k * k ? complex(n01(rng), n01(rng)) * std::exp(-kt2) : complex{};
        }
    }
    fft.backward();
    for (std::size_t i = 0; i < f.size(); ++i) f.amplitudes[i] = spec[i];
    return f;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const double kLambdaUm = 0.78;
const double kNInterface = 3.155;

Criterion finesse_chain()
{
    Criterion c{1, "finesse / FSR / linewidth chain"};
    const CavitySpec spec{330.0, 3.50, 1.03, 1.0, 1.0, std::nullopt};
    const double F = finesse_from_round_trip(round_trip_amplitude(spec));
    const double fsr = free_spectral_range(330.0, 3.50);
    const double width = linewidth(F, fsr);
    c.check(within(F, 92.0, 1.0), "finesse(alpha=1.03/cm, L=330um, R=1) = " + num(F) + "  [92 +/- 1]");
    c.check(within(fsr, 129.0, 1.0), "FSR(n_g=3.50) = " + num(fsr) + " GHz  [129 +/- 1]");
    c.check(within(width, 1.4, 0.1), "linewidth = " + num(width) + " GHz  [1.4 +/- 0.1]");
    return c;
}

Criterion fit_recovery()
{
    Criterion c{2, "fit recovers R and alpha"};
    std::vector<FinessePoint> data;
    for (double l : {260.0, 650.0, 1300.0}) data.push_back({l, oracle::finesse(0.89 * std::exp(-1.07 * l * 1e-4)), {}});
    const auto r = fit_losses(data);
    c.check(std::abs(r.R_fit - 0.89) < 1e-3, "R_fit = " + num(r.R_fit, 9) + "  [|dR| < 1e-3]");
    c.check(std::abs(r.alpha_fit - 1.07) < 1e-3, "alpha_fit = " + num(r.alpha_fit, 9) + " /cm  [|d alpha| < 1e-3]");
    return c;
}

Criterion mirror_stacks()
{
    Criterion c{3, "quarter-wave mirror stacks"};
    const double r3 = stack_reflectivity(quarter_wave_stack(3, 1.50, 2.35, 780.0, kNInterface, 1.0), 780.0);
    const double r6 = stack_reflectivity(quarter_wave_stack(6, 1.50, 2.35, 780.0, kNInterface, 1.0), 780.0);
    c.check(within(r3 * 100, 91.3, 1.5), "R3 = " + num(r3 * 100) + " %  [91.3 +/- 1.5]");
    c.check(within(r6 * 100, 99.4, 0.3), "R6 = " + num(r6 * 100) + " %  [99.4 +/- 0.3]");
    return c;
}

Criterion fresnel()
{
    Criterion c{4, "bare facet reflection"};
    const auto f = fresnel_interface(kNInterface);
    c.check(within(f.r * f.r * 100, 26.9, 0.1), "R(n=3.155) = " + num(f.r * f.r * 100) + " %  [26.9 +/- 0.1]");
    return c;
}

Criterion gap_model(const ModeSolution& mode)
{
    Criterion c{5, "gap loss spectrum"};
    const double d_min = 0.3, d_max = 3.0;
    const int steps = 271;
    const double step = (d_max - d_min) / (steps - 1);
    const auto rows = loss_spectrum(mode, d_min, d_max, steps);
    const auto peaks = cli::loss_maxima(rows);
    double worst = 0.0;
    std::string where;
    for (double p : peaks) {
        const double m = std::round(p / (kLambdaUm / 2));
        worst = std::max(worst, std::abs(p - m * kLambdaUm / 2));
        where += num(p, 3) + " ";
    }
    c.check(!peaks.empty() && worst <= step + 1e-9,
            "loss maxima at " + where + "um; worst offset from m*lambda/2 = " + num(worst, 3) + "  [<= " +
                num(step, 3) + "]");
    const auto model = GapOverlapModel::from_mode(mode);
    double diff = 0.0;
    for (double d : {0.5, 0.78, 1.2, 1.96, 2.7}) {
        GapConfig cfg;
        cfg.d = d;
        diff = std::max(diff, std::abs(gap_scattering(model, cfg).loss - simulate_gap_bounces(mode.field, cfg).loss));
    }
    c.check(diff <= 1e-4, "series vs bounce simulation, max |loss difference| = " + num(diff, 3) + "  [<= 1e-4]");
    return c;
}

Criterion composite(const ArmPhaseExtrema& ext)
{
    Criterion c{6, "composite round trip at d = 1.96 um"};
    c.check(within(ext.r_rt_min, 0.93, 0.02), "constructive r_rt = " + num(ext.r_rt_min) + "  [0.93 +/- 0.02]");
    c.check(ext.r_rt_max >= 0.99, "destructive r_rt = " + num(ext.r_rt_max) + "  [>= 0.99]");
    const double f_gap = finesse_from_round_trip(ext.r_rt_min);
    c.check(within(f_gap, 43.0, 4.0), "gap-limited finesse from computed r_rt = " + num(f_gap) + "  [43 +/- 4]");
    const CavitySpec spec{300.0, 3.50, 1.03, 1.0, 1.0, ext.r_rt_min};
    const double f300 = finesse_from_round_trip(round_trip_amplitude(spec));
    c.check(within(f300, 30.0, 3.0), "finesse with alpha=1.03/cm over 300 um = " + num(f300) + "  [30 +/- 3]");
    c.note("same formulas at r_rt = 0.93: " + num(finesse_from_round_trip(0.93)) + " and " +
           num(finesse_from_round_trip(0.93 * std::exp(-1.03 * 0.03))));
    return c;
}

Criterion enhancement(const ModeSolution& mode, const ArmPhaseExtrema& ext)
{
    Criterion c{7, "in-gap field enhancement"};
    GapConfig cfg;
    const double e = field_enhancement(mode, cfg, ext.constructive_phase);
    c.check(within(e, kNInterface, 0.1 * kNInterface),
            "constructive enhancement = " + num(e) + "  [" + num(kNInterface) + " +/- 10%]");
    c.note("destructive enhancement = " + num(field_enhancement(mode, cfg, ext.destructive_phase)));
    return c;
}

Criterion budget(const ModeSolution& mode, const ArmPhaseExtrema& ext)
{
    Criterion c{8, "cavity QED budget"};
    const AtomParams rb;
    const auto b = full_budget(9.9, CavitySpec{300.0, 3.50, 1.03, 1.0, 1.0, 0.93}, rb);
    c.check(within(b.g_over_2pi, 120.0, 12.0), "g/2pi(A=9.9um^2, L=300um) = " + num(b.g_over_2pi) + " MHz  [120 +/- 10%]");
    c.check(within(b.kappa_total_over_2pi, 4.8, 0.3),
            "kappa/2pi with kappa_T = kappa_intr, r_rt = 0.93 = " + num(b.kappa_total_over_2pi) + " GHz  [4.8 +/- 0.3]");
    c.check(within(b.cooperativity, 1.0, 0.2), "C = " + num(b.cooperativity) + "  [1.0 +/- 0.2]");
    const auto m = full_budget(mode, CavitySpec{300.0, 3.50, 1.03, 1.0, 1.0, std::nullopt}, ext.r_rt_min, rb);
    c.note("with solved A = " + num(mode.mode_area) + " um^2 and r_rt = " + num(ext.r_rt_min) +
           ": g/2pi = " + num(m.g_over_2pi) + " MHz, kappa/2pi = " + num(m.kappa_total_over_2pi) +
           " GHz, C = " + num(m.cooperativity));
    return c;
}

Criterion mode_solver(const ModeSolution& mode)
{
    Criterion c{9, "mode solver"};
    c.check(within(mode.mode_area, 9.9, 0.2 * 9.9), "default ridge mode_area = " + num(mode.mode_area) + " um^2  [9.9 +/- 20%]");
    c.note("n_eff = " + num(mode.n_eff, 8));
    const double got = solve_slab_mode(SlabProfile{4.0, 3.155, 3.145, 780.0}, 2048, 24.0);
    const double want = oracle::slab_neff(4.0, 3.155, 3.145, 0.78);
    c.check(std::abs(got - want) <= 1e-4, "slab n_eff = " + num(got, 9) + " vs analytic " + num(want, 9) + "  [<= 1e-4]");
    return c;
}

Criterion properties(const ModeSolution& mode)
{
    Criterion c{10, "property suites"};
    const GridSpec grid;
    double power_err = 0.0, semigroup_err = 0.0, max_overlap = 0.0;
    for (unsigned s = 0; s < 4; ++s) {
        const auto f = band_limited_field(grid, s);
        AngularSpectrumPropagator prop(f);
        for (double d : {0.5, 1.96, 20.0}) power_err = std::max(power_err, std::abs(prop.propagate(f, d).power() / f.power() - 1.0));
        const auto a = prop.propagate(prop.propagate(f, 0.7 + s), 1.3);
        const auto b = prop.propagate(f, 2.0 + s);
        for (std::size_t i = 0; i < a.size(); ++i) semigroup_err = std::max(semigroup_err, std::abs(a.amplitudes[i] - b.amplitudes[i]));
        max_overlap = std::max(max_overlap, std::abs(overlap(f, band_limited_field(grid, s + 50))));
        max_overlap = std::max(max_overlap, std::abs(overlap(mode.field, prop.propagate(f, 1.0))));
    }
    c.check(power_err <= 1e-9, "power conservation, max relative error = " + num(power_err, 3) + "  [<= 1e-9]");
    c.check(semigroup_err <= 1e-9, "semigroup, max |difference| = " + num(semigroup_err, 3) + "  [<= 1e-9]");
    c.check(max_overlap <= 1.0 + 1e-12, "max |overlap| = " + num(max_overlap, 9) + "  [<= 1]");

    double bookkeeping = 0.0;
    for (const auto& p : loss_spectrum(mode, 0.1, 3.0, 30)) bookkeeping = std::max(bookkeeping, std::abs(p.R + p.T + p.loss - 1.0));
    c.check(bookkeeping <= 1e-12, "R + T + loss - 1, max = " + num(bookkeeping, 3) + "  [<= 1e-12]");

    std::vector<FinessePoint> data{{260.0, 21.9, {}}, {650.0, 16.7, {}}, {1300.0, 12.4, {}}, {900.0, 15.1, {}}};
    const auto f1 = fit_losses(data);
    const auto f2 = fit_losses(data);
    c.check(f1.R_fit == f2.R_fit && f1.alpha_fit == f2.alpha_fit && f1.sigma_alpha == f2.sigma_alpha,
            "fit determinism: repeated fits identical");

    const auto dir = fs::temp_directory_path() / "gapcavity_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream(dir / "run.cfg") << "[waveguide]\nn_core = 3.155\nn_clad = 3.145\n[trap]\nc4_Jm4 = 1.2e-55\n";
        std::ofstream(dir / "f.csv") << "length_um,finesse\n260,21.7\n650,16.9\n1300,12.3\n";
    }
    const auto cfg = (dir / "run.cfg").string();
    auto run_all = [&](const fs::path& out) {
        std::ostringstream o, e;
        cli::cmd_mode({cfg, out.string()}, o, e);
        cli::cmd_gap_scan({cfg, 0.3, 3.0, 28, true, out.string()}, o, e);
        cli::cmd_fit({(dir / "f.csv").string()}, o, e);
        cli::cmd_budget({cfg, false}, o, e);
        cli::cmd_trap({cfg, out.string()}, o, e);
        std::string all = o.str() + e.str();
        for (const char* name : {"mode_field.csv", "gap_scan.csv", "phase_scan.csv", "trap_profile.csv"}) all += slurp(out / name);
        return all;
    };
    const auto first = run_all(dir / "a");
    const auto second = run_all(dir / "b");
    c.check(!first.empty() && first == second, "CLI reruns byte-identical (" + num(static_cast<double>(first.size())) + " bytes)");
    fs::remove_all(dir);
    return c;
}

Criterion trap()
{
    Criterion c{11, "trap potential"};
    TrapConfig t;
    t.omega_trap = 2.0 * constants::pi * 9e3;
    t.gap_width = 2.0;
    t.c4 = 0.0;
    const auto prof = potential_profile(t);
    const auto harmonic = trap_analysis(t);
    bool exact = harmonic.has_minimum && harmonic.min_position == 0.0 && harmonic.barrier_height == prof.front().U;
    for (const auto& s : prof) {
        const double z = s.z * 1e-6;
        exact = exact && s.U == 0.5 * t.atom_mass * t.omega_trap * t.omega_trap * z * z;
    }
    c.check(exact, "c4 = 0: harmonic profile, minimum at z = 0, barrier = wall-adjacent U");

    t.c4 = 1.2e-55;
    auto bound = [&](double d) {
        auto u = t;
        u.gap_width = d;
        return trap_analysis(u).has_minimum;
    };
    double lo = 0.05, hi = 5.0;
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bound(mid) ? hi : lo) = mid;
    }
    bool monotone = true;
    for (double d = 0.1; d < 4.0; d += 0.05) monotone = monotone && (bound(d) == (d > hi));
    const double oracle_d = 2.0 * std::pow(40.0 * t.c4 / (t.atom_mass * t.omega_trap * t.omega_trap), 1.0 / 6.0) * 1e6;
    c.check(monotone && within(hi, oracle_d, 0.01 * oracle_d),
            "existence monotone in d; threshold " + num(hi, 4) + " um vs curvature oracle " + num(oracle_d, 4) + " um");
    t.gap_width = 2.0;
    const auto typical = trap_analysis(t);
    c.check(typical.has_minimum && typical.barrier_height_uK > 0.0,
            "d = 2 um, 9 kHz, c4 = 1.2e-55 J m^4: bound well, barrier " + num(typical.barrier_height_uK, 4) + " uK");
    return c;
}

} // namespace

int main()
{
    std::vector<Criterion> results;
    auto guarded = [&](int id, const std::string& title, auto&& fn) {
        try {
            results.push_back(fn());
        } catch (const std::exception& e) {
            Criterion c{id, title};
            c.check(false, std::string("exception: ") + e.what());
            results.push_back(c);
        }
    };

    const auto mode = solve_fundamental_mode(WaveguideGeometry{}, GridSpec{});
    const auto ext = arm_phase_extrema(gap_scattering(mode, GapConfig{}));

    guarded(1, "finesse chain", finesse_chain);
    guarded(2, "fit", fit_recovery);
    guarded(3, "mirrors", mirror_stacks);
    guarded(4, "fresnel", fresnel);
    guarded(5, "gap", [&] { return gap_model(mode); });
    guarded(6, "composite", [&] { return composite(ext); });
    guarded(7, "enhancement", [&] { return enhancement(mode, ext); });
    guarded(8, "budget", [&] { return budget(mode, ext); });
    guarded(9, "mode", [&] { return mode_solver(mode); });
    guarded(10, "properties", [&] { return properties(mode); });
    guarded(11, "trap", trap);

    int failed = 0;
    for (const auto& r : results) {
        std::cout << (r.ok ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.title << '\n';
        for (const auto& l : r.lines) std::cout << "        " << l << '\n';
        failed += r.ok ? 0 : 1;
    }
    std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
