#include <iostream>

#include <CLI11.hpp>

#include "gapcavity/cli.hpp"

namespace gc = gapcavity::cli;

int main(int argc, char** argv)
{
    CLI::App app{"Gapped waveguide cavity toolkit"};
    app.require_subcommand(1);

    gc::ModeArgs mode;
    auto* m = app.add_subcommand("mode", "Solve the fundamental ridge mode");
    m->add_option("config", mode.config_path, "Configuration file")->required();
    m->add_option("--out", mode.out_dir, "Directory for artifacts");

    gc::GapScanArgs scan;
    auto* g = app.add_subcommand("gap-scan", "Gap reflection/transmission/loss versus gap width");
    g->add_option("config", scan.config_path, "Configuration file")->required();
    g->add_option("--d-min", scan.d_min, "Smallest gap width (um)");
    g->add_option("--d-max", scan.d_max, "Largest gap width (um)");
    g->add_option("--steps", scan.steps, "Number of widths");
    g->add_flag("--phase-scan", scan.phase_scan, "Also scan the arm phase at gap.d_um");
    g->add_option("--out", scan.out_dir, "Directory for artifacts");

    gc::FitArgs fit;
    auto* f = app.add_subcommand("fit", "Fit mirror reflectivity and propagation loss to finesse data");
    f->add_option("data", fit.data_path, "CSV with length_um,finesse[,sigma]")->required();

    gc::BudgetArgs budget;
    auto* b = app.add_subcommand("budget", "Cavity QED budget");
    b->add_option("config", budget.config_path, "Configuration file")->required();
    b->add_flag("--no-gap", budget.no_gap, "Ignore the gap (intrinsic guide budget)");

    gc::TrapArgs trap;
    auto* t = app.add_subcommand("trap", "Trapping potential across the gap");
    t->add_option("config", trap.config_path, "Configuration file")->required();
    t->add_option("--out", trap.out_dir, "Directory for artifacts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : gc::Validation;
    }

    if (*m) return gc::cmd_mode(mode, std::cout, std::cerr);
    if (*g) return gc::cmd_gap_scan(scan, std::cout, std::cerr);
    if (*f) return gc::cmd_fit(fit, std::cout, std::cerr);
    if (*b) return gc::cmd_budget(budget, std::cout, std::cerr);
    return gc::cmd_trap(trap, std::cout, std::cerr);
}
