#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cavity.hpp"
#include "cqed.hpp"
#include "error.hpp"
#include "field.hpp"
#include "gap.hpp"
#include "trap.hpp"
#include "waveguide.hpp"

namespace gapcavity {

// Plain-text configuration:
//
//   # comment
//   [waveguide]
//   n_core = 3.155
//
// Keys carry their unit in the name. Unknown blocks or keys are rejected.

namespace detail {

inline std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::optional<double> parse_double(std::string_view s)
{
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
    return v;
}

} // namespace detail

/// Raw `[block] key = value` entries with their line numbers.
class KeyValueFile {
public:
    struct Entry {
        std::string value;
        int line = 0;
        bool used = false;
    };

    static KeyValueFile parse(std::istream& in, std::string source = "config")
    {
        KeyValueFile f;
        f.source_ = std::move(source);
        std::string raw;
        std::string block;
        int line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
            const std::string line = detail::trim(raw);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']' || line.size() < 3) f.error(line_no, "malformed block header '" + line + "'");
                block = detail::trim(std::string_view(line).substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) f.error(line_no, "expected 'key = value', got '" + line + "'");
            if (block.empty()) f.error(line_no, "key outside of any [block]");
            const std::string key = detail::trim(std::string_view(line).substr(0, eq));
            const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
            if (key.empty()) f.error(line_no, "empty key");
            const auto full = block + "." + key;
            if (f.entries_.count(full)) {
                f.error(line_no, "duplicate key '" + full + "' (first on line " +
                                     std::to_string(f.entries_[full].line) + ")");
            }
            f.entries_[full] = Entry{value, line_no, false};
            f.blocks_.push_back(block);
        }
        return f;
    }

    static KeyValueFile load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) fail(ErrorKind::Config, "cannot open config file '" + path + "'");
        return parse(in, path);
    }

    [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) > 0; }

    [[nodiscard]] std::optional<double> number(const std::string& key)
    {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        it->second.used = true;
        auto v = detail::parse_double(it->second.value);
        if (!v) error(it->second.line, "key '" + key + "' expects a number, got '" + it->second.value + "'");
        return v;
    }

    double number_or(const std::string& key, double fallback) { return number(key).value_or(fallback); }

    double required_number(const std::string& key)
    {
        auto v = number(key);
        if (!v) fail(ErrorKind::Config, source_ + ": missing required key '" + key + "'");
        return *v;
    }

    std::optional<std::string> text(const std::string& key)
    {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    bool boolean_or(const std::string& key, bool fallback)
    {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        it->second.used = true;
        const auto& v = it->second.value;
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        error(it->second.line, "key '" + key + "' expects true/false, got '" + v + "'");
    }

    std::size_t count_or(const std::string& key, std::size_t fallback)
    {
        auto v = number(key);
        if (!v) return fallback;
        if (*v < 0 || std::floor(*v) != *v) error(line_of(key), "key '" + key + "' expects a non-negative integer");
        return static_cast<std::size_t>(*v);
    }

    [[nodiscard]] int line_of(const std::string& key) const
    {
        auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    /// Rejects any key that no reader asked for.
    void reject_unused() const
    {
        for (const auto& [key, e] : entries_) {
            if (!e.used) error(e.line, "unknown key '" + key + "'");
        }
    }

    [[noreturn]] void error(int line, const std::string& what) const
    {
        fail(ErrorKind::Config, source_ + ":" + std::to_string(line) + ": " + what);
    }

    [[nodiscard]] const std::string& source() const { return source_; }

private:
    std::string source_;
    std::map<std::string, Entry> entries_;
    std::vector<std::string> blocks_;
};

struct MirrorConfig {
    double n_low = 1.50;   // YF3
    double n_high = 2.35;  // ZnS
    bool low_first = true;
    double n_exit = 1.0;
    std::vector<int> pair_counts{3, 6};
};

struct BudgetConfig {
    CavitySpec cavity{300.0, 3.50, 1.03, 1.0, 1.0, std::nullopt};
    std::vector<DispersionSample> dispersion;  // overrides n_group when given
    std::optional<double> mode_area_um2;       // skip the mode solve
    std::optional<double> gap_round_trip;      // skip the gap model
    double enhancement = 1.0;
};

struct ProjectConfig {
    WaveguideGeometry waveguide;
    GridSpec grid;
    GapConfig gap;
    int arm_phase_steps = 720;
    MirrorConfig mirror;
    AtomParams atom;
    BudgetConfig budget;
    double trap_omega_over_2pi_kHz = 9.0;
    double trap_mass = constants::rb87_mass;
    std::optional<double> trap_c4;
    double trap_gap_width_um = 2.0;
    int trap_z_samples = 1001;

    [[nodiscard]] TrapConfig trap_config() const
    {
        if (!trap_c4) fail(ErrorKind::Config, "missing required key 'trap.c4_Jm4' (no default is assumed)");
        TrapConfig t;
        t.omega_trap = 2.0 * constants::pi * trap_omega_over_2pi_kHz * 1e3;
        t.atom_mass = trap_mass;
        t.c4 = *trap_c4;
        t.gap_width = trap_gap_width_um;
        t.z_samples = trap_z_samples;
        return t;
    }

    [[nodiscard]] double n_group() const
    {
        return budget.dispersion.empty() ? budget.cavity.n_group : group_index(budget.dispersion);
    }
};

namespace detail {

inline std::vector<DispersionSample> parse_dispersion(KeyValueFile& f, const std::string& key)
{
    std::vector<DispersionSample> out;
    auto txt = f.text(key);
    if (!txt) return out;
    std::stringstream ss(*txt);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        const auto colon = item.find(':');
        if (colon == std::string::npos) f.error(f.line_of(key), "dispersion sample '" + item + "' is not lambda_nm:n_eff");
        auto l = parse_double(trim(std::string_view(item).substr(0, colon)));
        auto n = parse_double(trim(std::string_view(item).substr(colon + 1)));
        if (!l || !n) f.error(f.line_of(key), "dispersion sample '" + item + "' is not numeric");
        out.push_back({*l, *n});
    }
    return out;
}

inline std::vector<int> parse_int_list(KeyValueFile& f, const std::string& key, std::vector<int> fallback)
{
    auto txt = f.text(key);
    if (!txt) return fallback;
    std::vector<int> out;
    std::stringstream ss(*txt);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto v = parse_double(trim(item));
        if (!v || *v < 0 || std::floor(*v) != *v) f.error(f.line_of(key), "'" + item + "' is not a non-negative integer");
        out.push_back(static_cast<int>(*v));
    }
    return out;
}

template <class Fn>
void validate_block(const KeyValueFile& f, const std::string& block_key, Fn&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config) throw;
        const int line = f.line_of(block_key);
        fail(ErrorKind::Config, f.source() + (line ? ":" + std::to_string(line) : std::string()) + ": " + e.what());
    }
}

} // namespace detail

/// Builds and fully validates a ProjectConfig before any computation.
inline ProjectConfig parse_project_config(KeyValueFile f)
{
    ProjectConfig c;
    auto& w = c.waveguide;
    w.n_core = f.required_number("waveguide.n_core");
    w.n_clad = f.required_number("waveguide.n_clad");
    w.ridge_width = f.number_or("waveguide.ridge_width_um", w.ridge_width);
    w.ridge_height = f.number_or("waveguide.ridge_height_um", w.ridge_height);
    w.core_thickness = f.number_or("waveguide.core_thickness_um", w.core_thickness);
    w.top_cladding_thickness = f.number_or("waveguide.top_cladding_thickness_um", w.top_cladding_thickness);
    w.cladding_thickness = f.number_or("waveguide.cladding_thickness_um", w.cladding_thickness);
    w.n_exterior = f.number_or("waveguide.n_exterior", w.n_exterior);
    w.n_substrate = f.number_or("waveguide.n_substrate", w.n_clad);
    w.wavelength = f.number_or("waveguide.wavelength_nm", w.wavelength);
    detail::validate_block(f, "waveguide.n_core", [&] { w.validate(); });

    c.grid.nx = f.count_or("grid.nx", c.grid.nx);
    c.grid.ny = f.count_or("grid.ny", c.grid.ny);
    c.grid.window_x = f.number_or("grid.window_x_um", c.grid.window_x);
    c.grid.window_y = f.number_or("grid.window_y_um", c.grid.window_y);
    detail::validate_block(f, "grid.nx", [&] { c.grid.validate(); });

    c.gap.d = f.number_or("gap.d_um", c.gap.d);
    c.gap.n_interface = f.number_or("gap.n_interface", c.gap.n_interface);
    c.gap.series_tolerance = f.number_or("gap.series_tolerance", c.gap.series_tolerance);
    c.gap.p_max = static_cast<int>(f.count_or("gap.p_max", static_cast<std::size_t>(c.gap.p_max)));
    if (auto pc = f.text("gap.phase_convention")) {
        if (*pc == "profile") {
            c.gap.phase = PhaseConvention::Profile;
        } else if (*pc == "full") {
            c.gap.phase = PhaseConvention::Full;
        } else {
            f.error(f.line_of("gap.phase_convention"), "phase_convention must be 'profile' or 'full'");
        }
    }
    c.arm_phase_steps = static_cast<int>(f.count_or("gap.arm_phase_steps", 720));
    detail::validate_block(f, "gap.d_um", [&] {
        c.gap.validate();
        require(c.arm_phase_steps >= 16, ErrorKind::InvalidArgument, "arm_phase_steps must be >= 16");
    });

    c.mirror.n_low = f.number_or("mirror.n_low", c.mirror.n_low);
    c.mirror.n_high = f.number_or("mirror.n_high", c.mirror.n_high);
    c.mirror.low_first = f.boolean_or("mirror.low_index_first", c.mirror.low_first);
    c.mirror.n_exit = f.number_or("mirror.n_exit", c.mirror.n_exit);
    c.mirror.pair_counts = detail::parse_int_list(f, "mirror.pairs", c.mirror.pair_counts);
    detail::validate_block(f, "mirror.n_low", [&] {
        require(c.mirror.n_low >= 1 && c.mirror.n_high >= 1 && c.mirror.n_exit >= 1, ErrorKind::InvalidIndex,
                "mirror indices must be >= 1");
    });

    c.atom.dipole_moment = f.number_or("atom.dipole_Cm", c.atom.dipole_moment);
    c.atom.gamma_half = f.number_or("atom.gamma_half_MHz", c.atom.gamma_half);
    c.atom.transition_wavelength = f.number_or("atom.wavelength_nm", w.wavelength);
    c.atom.mass = f.number_or("atom.mass_kg", c.atom.mass);
    detail::validate_block(f, "atom.dipole_Cm", [&] { c.atom.validate(); });

    auto& cav = c.budget.cavity;
    cav.length = f.number_or("cavity.length_um", cav.length);
    cav.n_group = f.number_or("cavity.n_group", cav.n_group);
    cav.alpha = f.number_or("cavity.alpha_per_cm", cav.alpha);
    c.budget.dispersion = detail::parse_dispersion(f, "cavity.dispersion_samples");
    c.budget.mode_area_um2 = f.number("cavity.mode_area_um2");
    c.budget.gap_round_trip = f.number("cavity.gap_round_trip");
    c.budget.enhancement = f.number_or("cavity.enhancement", c.budget.enhancement);
    detail::validate_block(f, "cavity.length_um", [&] {
        cav.validate();
        if (!c.budget.dispersion.empty()) require(c.n_group() > 0, ErrorKind::InvalidArgument, "dispersion gives n_group <= 0");
        if (c.budget.mode_area_um2) require(*c.budget.mode_area_um2 > 0, ErrorKind::InvalidArgument, "mode_area_um2 must be positive");
        if (c.budget.gap_round_trip) {
            require(*c.budget.gap_round_trip > 0 && *c.budget.gap_round_trip <= 1, ErrorKind::InvalidArgument,
                    "gap_round_trip must lie in (0, 1]");
        }
        require(c.budget.enhancement >= 1.0, ErrorKind::InvalidArgument, "enhancement must be >= 1");
    });

    c.trap_omega_over_2pi_kHz = f.number_or("trap.omega_over_2pi_kHz", c.trap_omega_over_2pi_kHz);
    c.trap_mass = f.number_or("trap.mass_kg", c.trap_mass);
    c.trap_c4 = f.number("trap.c4_Jm4");
    c.trap_gap_width_um = f.number_or("trap.gap_width_um", c.trap_gap_width_um);
    c.trap_z_samples = static_cast<int>(f.count_or("trap.z_samples", static_cast<std::size_t>(c.trap_z_samples)));
    detail::validate_block(f, "trap.omega_over_2pi_kHz", [&] {
        TrapConfig t;
        t.omega_trap = 2.0 * constants::pi * c.trap_omega_over_2pi_kHz * 1e3;
        t.atom_mass = c.trap_mass;
        t.c4 = c.trap_c4.value_or(0.0);
        t.gap_width = c.trap_gap_width_um;
        t.z_samples = c.trap_z_samples;
        t.validate();
    });

    f.reject_unused();
    return c;
}

inline ProjectConfig load_project_config(const std::string& path)
{
    return parse_project_config(KeyValueFile::load(path));
}

inline ProjectConfig parse_project_config_text(const std::string& text)
{
    std::istringstream in(text);
    return parse_project_config(KeyValueFile::parse(in));
}

} // namespace gapcavity
