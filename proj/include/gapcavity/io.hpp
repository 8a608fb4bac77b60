#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "error.hpp"
#include "field.hpp"
#include "fit.hpp"
#include "gap.hpp"
#include "trap.hpp"

namespace gapcavity::io {

/// Six significant digits, '.' decimal separator regardless of the global locale.
inline std::string fmt(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(6) << (v == 0.0 ? 0.0 : v);
    return os.str();
}

inline std::string fmt(bool b) { return b ? "true" : "false"; }

/// Writes `content` to `path` through a sibling temp file and a rename, so a
/// failed run never leaves a truncated artifact behind.
inline void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::Config, "cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp);
            fail(ErrorKind::Config, "write to '" + tmp.string() + "' failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

inline std::string field_csv(const SampledField& f)
{
    std::string s = "x_um,y_um,re,im\n";
    for (std::size_t ix = 0; ix < f.nx; ++ix) {
        for (std::size_t iy = 0; iy < f.ny; ++iy) {
            const auto a = f(ix, iy);
            s += fmt(f.x(ix)) + ',' + fmt(f.y(iy)) + ',' + fmt(a.real()) + ',' + fmt(a.imag()) + '\n';
        }
    }
    return s;
}

inline std::string loss_csv(const std::vector<LossPoint>& rows)
{
    std::string s = "d_um,R,T,loss\n";
    for (const auto& r : rows) s += fmt(r.d) + ',' + fmt(r.R) + ',' + fmt(r.T) + ',' + fmt(r.loss) + '\n';
    return s;
}

inline std::string phase_csv(const std::vector<PhasePoint>& rows)
{
    std::string s = "phase_rad,r_rt\n";
    for (const auto& r : rows) s += fmt(r.phase) + ',' + fmt(r.r_rt) + '\n';
    return s;
}

inline std::string trap_csv(const std::vector<TrapSample>& rows)
{
    std::string s = "z_um,U_J,U_uK\n";
    for (const auto& r : rows) s += fmt(r.z) + ',' + fmt(r.U) + ',' + fmt(joule_to_uK(r.U)) + '\n';
    return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(detail::trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

/// Finesse measurements, header `length_um,finesse[,sigma]`.
inline std::vector<FinessePoint> read_finesse_csv(std::istream& in, const std::string& source = "csv")
{
    std::string line;
    int row = 0;
    auto bad = [&](int r, int col, const std::string& what) {
        fail(ErrorKind::InvalidArgument,
             source + ": row " + std::to_string(r) + ", column " + std::to_string(col) + ": " + what);
    };
    bool have_header = false;
    bool with_sigma = false;
    std::vector<FinessePoint> out;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (!have_header) {
            const bool ok2 = cells.size() == 2 && cells[0] == "length_um" && cells[1] == "finesse";
            const bool ok3 = cells.size() == 3 && cells[0] == "length_um" && cells[1] == "finesse" && cells[2] == "sigma";
            if (!ok2 && !ok3) bad(row, 1, "expected header 'length_um,finesse[,sigma]'");
            with_sigma = ok3;
            have_header = true;
            continue;
        }
        const std::size_t expect = with_sigma ? 3 : 2;
        if (cells.size() != expect) {
            bad(row, static_cast<int>(std::min(cells.size(), expect)) + 1,
                "expected " + std::to_string(expect) + " cells, got " + std::to_string(cells.size()));
        }
        double v[3] = {0, 0, 0};
        static const char* names[] = {"length_um", "finesse", "sigma"};
        for (std::size_t c = 0; c < expect; ++c) {
            auto x = detail::parse_double(cells[c]);
            if (!x) bad(row, static_cast<int>(c) + 1, std::string(names[c]) + " cell '" + cells[c] + "' is not a number");
            if (*x <= 0.0) bad(row, static_cast<int>(c) + 1, std::string(names[c]) + " must be positive");
            v[c] = *x;
        }
        FinessePoint p{v[0], v[1], std::nullopt};
        if (with_sigma) p.sigma = v[2];
        out.push_back(p);
    }
    if (!have_header) fail(ErrorKind::InvalidArgument, source + ": empty file");
    return out;
}

inline std::vector<FinessePoint> load_finesse_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
    return read_finesse_csv(in, path);
}

} // namespace gapcavity::io
