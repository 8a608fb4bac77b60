#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gapcavity/cli.hpp"

namespace fs = std::filesystem;
using namespace gapcavity;

namespace {

const char* kConfig = R"(# test configuration
[waveguide]
n_core = 3.155
n_clad = 3.145

[gap]
d_um = 1.96

[cavity]
length_um = 300

[trap]
omega_over_2pi_kHz = 9
c4_Jm4 = 1.2e-55
gap_width_um = 2.0
)";

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("gapcavity_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text)
    {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }

    static std::string replace(std::string s, const std::string& from, const std::string& to)
    {
        const auto pos = s.find(from);
        EXPECT_NE(pos, std::string::npos) << from;
        return s.replace(pos, from.size(), to);
    }

    static std::string slurp(const fs::path& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }

    fs::path dir_;
};

} // namespace

TEST(Config, DefaultsAndOverrides)
{
    const auto c = parse_project_config_text(kConfig);
    EXPECT_EQ(c.waveguide.n_core, 3.155);
    EXPECT_EQ(c.waveguide.ridge_width, WaveguideGeometry{}.ridge_width);
    EXPECT_EQ(c.grid.nx, 256u);
    EXPECT_EQ(c.gap.d, 1.96);
    EXPECT_EQ(c.budget.cavity.length, 300.0);
    EXPECT_EQ(c.mirror.pair_counts, (std::vector<int>{3, 6}));
    ASSERT_TRUE(c.trap_c4.has_value());
}

TEST(Config, ErrorsCarryLineNumbers)
{
    auto expect_message = [](const std::string& text, const std::string& needle) {
        try {
            parse_project_config_text(text);
            FAIL() << "accepted: " << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::Config);
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    };
    expect_message("[waveguide]\nn_core = 3.155\nn_clad = 3.145\nbogus = 1\n", ":4:");
    expect_message("[waveguide]\nn_core = abc\nn_clad = 3.145\n", ":2:");
    expect_message("[waveguide]\nn_clad = 3.145\n", "n_core");
    expect_message("[waveguide]\nn_core = 3.155\nn_clad = 3.145\n[grid]\nnx = 100\n", ":5:");
    expect_message("n_core = 3\n", ":1:");
}

TEST(Config, DispersionSetsGroupIndex)
{
    std::string text = kConfig;
    text.insert(text.find("length_um = 300") , "dispersion_samples = 779:3.1540, 780:3.1535, 781:3.1530\n");
    const auto c = parse_project_config_text(text);
    EXPECT_NEAR(c.n_group(), 3.1535 + 780.0 * 5e-4, 1e-9);
}

TEST(Io, SixSignificantDigits)
{
    EXPECT_EQ(io::fmt(0.1234567), "0.123457");
    EXPECT_EQ(io::fmt(1.2e-55), "1.2e-55");
    EXPECT_EQ(io::fmt(-0.0), "0");
    EXPECT_EQ(io::fmt(129.7797), "129.78");
}

TEST(Io, FinesseCsvErrorsNameRowAndColumn)
{
    std::istringstream good("length_um,finesse,sigma\n260,21.7,0.5\n650,16.9,0.5\n");
    EXPECT_EQ(io::read_finesse_csv(good).size(), 2u);
    std::istringstream bad("length_um,finesse\n260,21.7\n650,abc\n");
    try {
        io::read_finesse_csv(bad);
        FAIL();
    } catch (const Error& e) {
        const std::string m = e.what();
        EXPECT_NE(m.find("row 3"), std::string::npos) << m;
        EXPECT_NE(m.find("column 2"), std::string::npos) << m;
        EXPECT_NE(m.find("abc"), std::string::npos) << m;
    }
    std::istringstream header("l,F\n1,2\n");
    EXPECT_THROW(io::read_finesse_csv(header), Error);
}

TEST_F(CliTest, ModeReportsArea)
{
    const auto cfg = write("a.cfg", kConfig);
    std::ostringstream out, err;
    ASSERT_EQ(cli::cmd_mode({cfg, dir_.string()}, out, err), 0) << err.str();
    EXPECT_NE(out.str().find("mode_area_um2="), std::string::npos);
    const auto csv = slurp(dir_ / "mode_field.csv");
    EXPECT_EQ(csv.rfind("x_um,y_um,re,im\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 256 * 256 + 1);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST_F(CliTest, MissingCoreIndexIsValidationError)
{
    const auto cfg = write("a.cfg", replace(kConfig, "n_core = 3.155\n", ""));
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_mode({cfg, dir_.string()}, out, err), 2);
    EXPECT_NE(err.str().find("n_core"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir_ / "mode_field.csv"));
}

TEST_F(CliTest, ZeroContrastIsNoMode)
{
    const auto cfg = write("a.cfg", replace(kConfig, "n_clad = 3.145", "n_clad = 3.155"));
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_mode({cfg, dir_.string()}, out, err), 3) << err.str();
    EXPECT_FALSE(fs::exists(dir_ / "mode_field.csv"));
}

TEST_F(CliTest, GapScanAndPhaseScan)
{
    const auto cfg = write("a.cfg", kConfig);
    std::ostringstream out, err;
    cli::GapScanArgs a{cfg, 0.3, 3.0, 271, true, dir_.string()};
    ASSERT_EQ(cli::cmd_gap_scan(a, out, err), 0) << err.str();
    const auto csv = slurp(dir_ / "gap_scan.csv");
    EXPECT_EQ(csv.rfind("d_um,R,T,loss\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 272);
    EXPECT_EQ(slurp(dir_ / "phase_scan.csv").rfind("phase_rad,r_rt\n", 0), 0u);
    EXPECT_NE(out.str().find("r_rt_min="), std::string::npos);

    const auto first = out.str();
    std::ostringstream out2;
    ASSERT_EQ(cli::cmd_gap_scan(a, out2, err), 0);
    EXPECT_EQ(first, out2.str());
    EXPECT_EQ(csv, slurp(dir_ / "gap_scan.csv"));
}

TEST_F(CliTest, GapScanRangeValidation)
{
    const auto cfg = write("a.cfg", kConfig);
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_gap_scan({cfg, 3.0, 0.3, 10, false, dir_.string()}, out, err), 2);
    EXPECT_FALSE(fs::exists(dir_ / "gap_scan.csv"));
}

TEST_F(CliTest, GapScanSeriesCapIsConvergenceFailure)
{
    const auto cfg = write("a.cfg", replace(kConfig, "d_um = 1.96", "d_um = 1.96\np_max = 2"));
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_gap_scan({cfg, 0.3, 3.0, 10, false, dir_.string()}, out, err), 4) << err.str();
}

TEST_F(CliTest, FitReportAndErrors)
{
    std::ostringstream out, err;
    const auto good = write("f.csv", "length_um,finesse\n260,21.7443\n650,16.8583\n1300,12.256\n");
    ASSERT_EQ(cli::cmd_fit({good}, out, err), 0) << err.str();
    EXPECT_NE(out.str().find("R_fit=0.89\n"), std::string::npos) << out.str();
    EXPECT_NE(out.str().find("alpha_fit_per_cm=1.07"), std::string::npos) << out.str();
    EXPECT_NE(out.str().find("sigma_alpha="), std::string::npos);

    std::ostringstream e2;
    EXPECT_EQ(cli::cmd_fit({write("two.csv", "length_um,finesse\n260,21.7\n650,16.9\n")}, out, e2), 2);
    EXPECT_NE(e2.str().find("InsufficientData"), std::string::npos);

    std::ostringstream e3;
    EXPECT_EQ(cli::cmd_fit({write("nan.csv", "length_um,finesse\n260,21.7\n650,x16\n1300,12\n")}, out, e3), 2);
    EXPECT_NE(e3.str().find("x16"), std::string::npos) << e3.str();
}

TEST_F(CliTest, BudgetReport)
{
    const auto cfg = write("a.cfg", replace(kConfig, "length_um = 300",
                                            "length_um = 300\nmode_area_um2 = 9.9\ngap_round_trip = 0.93"));
    std::ostringstream out, err;
    ASSERT_EQ(cli::cmd_budget({cfg, false}, out, err), 0) << err.str();
    EXPECT_NE(out.str().find("C=1.00"), std::string::npos) << out.str();
    EXPECT_NE(out.str().find("mirror_R3=0.91"), std::string::npos) << out.str();
    EXPECT_NE(out.str().find("mirror_R6=0.994"), std::string::npos) << out.str();

    const auto nogap = write("b.cfg", replace(kConfig, "length_um = 300", "length_um = 330\nmode_area_um2 = 9.9"));
    std::ostringstream out2;
    ASSERT_EQ(cli::cmd_budget({nogap, true}, out2, err), 0) << err.str();
    EXPECT_NE(out2.str().find("finesse_intr=92.4"), std::string::npos) << out2.str();
}

TEST_F(CliTest, TrapOutputs)
{
    std::ostringstream out, err;
    ASSERT_EQ(cli::cmd_trap({write("a.cfg", kConfig), dir_.string()}, out, err), 0) << err.str();
    EXPECT_NE(out.str().find("has_minimum=true"), std::string::npos);
    EXPECT_EQ(slurp(dir_ / "trap_profile.csv").rfind("z_um,U_J,U_uK\n", 0), 0u);

    std::ostringstream out2;
    ASSERT_EQ(cli::cmd_trap({write("n.cfg", replace(kConfig, "gap_width_um = 2.0", "gap_width_um = 0.2")),
                             dir_.string()},
                            out2, err),
              0);
    EXPECT_NE(out2.str().find("has_minimum=false"), std::string::npos);

    fs::remove(dir_ / "trap_profile.csv");
    std::ostringstream e3;
    EXPECT_EQ(cli::cmd_trap({write("c.cfg", replace(kConfig, "c4_Jm4 = 1.2e-55\n", "")), dir_.string()}, out, e3), 2);
    EXPECT_NE(e3.str().find("c4"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir_ / "trap_profile.csv"));
}
