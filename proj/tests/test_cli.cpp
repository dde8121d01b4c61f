#include "insider/cli.hpp"
#include "insider/recursion.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace insider;
using namespace insider::cli;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("insider_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    RunConfig config(ModelKind m, std::vector<int> periods) const
    {
        RunConfig cfg;
        cfg.model = m;
        cfg.periods = std::move(periods);
        cfg.out_dir = dir_;
        return cfg;
    }

    fs::path dir_;
    std::ostringstream log_;
};

std::string slurp(const fs::path& file)
{
    std::ifstream is(file, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

double cell(const report::CsvTable& t, std::size_t row, const std::string& column)
{
    return report::parse_double(t.rows.at(row).at(t.column(column)));
}

}  // namespace

TEST(Options, ParseAndOverride)
{
    RunConfig cfg;
    set_option(cfg, "model", "seeking");
    set_option(cfg, "periods", "5, 20,100");
    set_option(cfg, "sigma0", "2.5");
    set_option(cfg, "sigma-u", "0.25");
    set_option(cfg, "paths", "1000");
    set_option(cfg, "seed", "99");
    set_option(cfg, "deviation-mult", "1.2");
    set_option(cfg, "offset-lag", "0.3");
    set_option(cfg, "figures", "1a,7");
    EXPECT_EQ(cfg.model, ModelKind::RiskSeeking);
    EXPECT_EQ(cfg.periods, (std::vector<int>{5, 20, 100}));
    EXPECT_EQ(cfg.sigma0_sq, 2.5);
    EXPECT_EQ(cfg.sigma_u, 0.25);
    EXPECT_EQ(cfg.n_paths, 1000);
    EXPECT_EQ(cfg.seed, 99u);
    ASSERT_TRUE(cfg.deviation.has_value());
    EXPECT_EQ(cfg.deviation->period, 1);
    EXPECT_EQ(cfg.deviation->multiplier, 1.2);
    ASSERT_TRUE(cfg.offset.has_value());
    EXPECT_EQ(cfg.offset->constant, 0.0);
    EXPECT_EQ(cfg.figures, (std::vector<std::string>{"1a", "7"}));

    EXPECT_THROW(set_option(cfg, "paths", "ten"), Error);
    EXPECT_THROW(set_option(cfg, "sigma0", "1.0x"), Error);
    EXPECT_THROW(set_option(cfg, "colour", "red"), Error);
    EXPECT_THROW(set_option(cfg, "model", "neutral-ish"), Error);
    EXPECT_THROW(parse_int_list(""), Error);
}

TEST(Options, DefaultsMatchBaseParameterization)
{
    const RunConfig cfg;
    const MarketParams p = cfg.params(20);
    EXPECT_EQ(p.sigma0_sq, 1.0);
    EXPECT_EQ(p.sigma_u, 0.5);
    EXPECT_EQ(p.p0, 0.0);
    RunConfig bad;
    bad.sigma_u = -1;
    EXPECT_THROW(bad.params(5), Error);
}

TEST_F(CliTest, ConfigFileThenOverride)
{
    const fs::path file = dir_ / "run.cfg";
    std::ofstream(file) << "# comment line\nmodel = averse\nperiods=10  # trailing\n\nseed=5\n";
    RunConfig cfg;
    apply_config_file(cfg, file);
    EXPECT_EQ(cfg.model, ModelKind::RiskAverse);
    EXPECT_EQ(cfg.periods, std::vector<int>{10});
    set_option(cfg, "seed", "6");  // flags applied after the file win
    EXPECT_EQ(cfg.seed, 6u);

    std::ofstream(dir_ / "bad.cfg") << "model averse\n";
    EXPECT_THROW(apply_config_file(cfg, dir_ / "bad.cfg"), Error);
    try {
        apply_config_file(cfg, dir_ / "missing.cfg");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(exit_code_for(e), kExitIo);
    }
}

TEST_F(CliTest, SolveKyleTwoPeriods)
{
    ASSERT_EQ(cmd_solve(config(ModelKind::KyleBaseline, {2}), log_), kExitOk);
    const report::CsvTable path = report::read_csv(dir_ / "path.csv");
    EXPECT_EQ(path.header, (std::vector<std::string>{"n", "beta", "lambda", "sigma", "alpha", "delta"}));
    EXPECT_NEAR(cell(path, 0, "alpha"), 0.26499, 1e-5);
    const report::CsvTable coeffs = report::read_csv(dir_ / "coefficients.csv");
    EXPECT_EQ(coeffs.header, (std::vector<std::string>{"n", "a", "b", "c"}));
    EXPECT_EQ(coeffs.rows.size(), 3u);
    EXPECT_EQ(coeffs.rows[0][3], "");  // c_0 does not exist
    EXPECT_EQ(coeffs.rows[2][1], "");  // nor does a_N
}

TEST_F(CliTest, SolveAverseSinglePeriodAndSeekingTwoPeriods)
{
    ASSERT_EQ(cmd_solve(config(ModelKind::RiskAverse, {1}), log_), kExitOk);
    const report::CsvTable path = report::read_csv(dir_ / "path.csv");
    EXPECT_EQ(cell(path, 1, "beta"), 0.5);
    EXPECT_EQ(cell(path, 1, "lambda"), 1.0);

    ASSERT_EQ(cmd_solve(config(ModelKind::RiskSeeking, {2}), log_), kExitOk);
    EXPECT_NEAR(cell(report::read_csv(dir_ / "coefficients.csv"), 0, "b"), 0.7587, 5e-5);
}

TEST_F(CliTest, SolveWritesOneDirectoryPerPeriodCount)
{
    ASSERT_EQ(cmd_solve(config(ModelKind::RiskNeutral, {3, 7}), log_), kExitOk);
    EXPECT_TRUE(fs::exists(dir_ / "N3" / "coefficients.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "N7" / "path.csv"));
}

TEST_F(CliTest, CsvRoundTripReproducesSolve)
{
    for (ModelKind m : kAllModels) {
        ASSERT_EQ(cmd_solve(config(m, {25}), log_), kExitOk);
        const MarketParams mp{1.0, 0.5, 25, 0.0};
        const CoefficientPath fresh = solve(m, mp);
        const CoefficientPath parsed = read_coefficients_csv(dir_ / "coefficients.csv", m);
        EXPECT_EQ(parsed.a, fresh.a);
        EXPECT_EQ(parsed.b, fresh.b);
        EXPECT_EQ(parsed.c, fresh.c);

        const EquilibriumPath eq = build_path(parsed, mp);
        const report::CsvTable path = report::read_csv(dir_ / "path.csv");
        for (int n = 1; n <= 25; ++n) {
            EXPECT_EQ(cell(path, static_cast<std::size_t>(n), "beta"), eq.beta[n]);
            EXPECT_EQ(cell(path, static_cast<std::size_t>(n), "sigma"), eq.sigma[n]);
        }
    }
}

TEST_F(CliTest, SolveReportsValidationErrors)
{
    RunConfig cfg = config(ModelKind::RiskNeutral, {0});
    EXPECT_EQ(cmd_solve(cfg, log_), kExitValidation);
    EXPECT_NE(log_.str().find("ZeroPeriods"), std::string::npos);
}

TEST_F(CliTest, OutputErrorsMapToIoExitCode)
{
    std::ofstream(dir_ / "blocker") << "x";
    RunConfig cfg = config(ModelKind::RiskNeutral, {3});
    cfg.out_dir = dir_ / "blocker" / "sub";
    EXPECT_EQ(cmd_solve(cfg, log_), kExitIo);
}

TEST_F(CliTest, SimulateWritesSummaryAndPassesGates)
{
    RunConfig cfg = config(ModelKind::KyleBaseline, {2});
    cfg.n_paths = 100'000;
    ASSERT_EQ(cmd_simulate(cfg, log_), kExitOk) << log_.str();
    const report::CsvTable s = report::read_csv(dir_ / "sim_summary.csv");
    EXPECT_EQ(s.header, (std::vector<std::string>{"statistic", "period", "value", "std_error"}));
    EXPECT_NEAR(cell(s, 0, "value"), 0.3103, 4 * cell(s, 0, "std_error"));
    const report::CsvTable g = report::read_csv(dir_ / "sim_gates.csv");
    for (std::size_t r = 0; r < g.rows.size(); ++r) EXPECT_EQ(g.rows[r][g.column("pass")], "true");
}

TEST_F(CliTest, SimulateOffsetGate)
{
    RunConfig cfg = config(ModelKind::RiskNeutral, {5});
    cfg.offset = Offset{0.3, 0.1};
    ASSERT_EQ(cmd_simulate(cfg, log_), kExitOk) << log_.str();
    EXPECT_NE(slurp(dir_ / "sim_gates.csv").find("offset_profit_delta"), std::string::npos);
}

TEST_F(CliTest, SimulateDeviationGate)
{
    RunConfig cfg = config(ModelKind::RiskNeutral, {2});
    cfg.deviation = Deviation{1, 1.2};
    ASSERT_EQ(cmd_simulate(cfg, log_), kExitOk) << log_.str();
    EXPECT_NE(slurp(dir_ / "sim_gates.csv").find("deviation_profit"), std::string::npos);
}

TEST_F(CliTest, SimulateFilesIdenticalAcrossThreadCounts)
{
    RunConfig cfg = config(ModelKind::RiskSeeking, {4});
    cfg.n_paths = 30'000;
    cfg.threads = 1;
    cfg.out_dir = dir_ / "one";
    ASSERT_EQ(cmd_simulate(cfg, log_), kExitOk);
    cfg.threads = 8;
    cfg.out_dir = dir_ / "eight";
    ASSERT_EQ(cmd_simulate(cfg, log_), kExitOk);
    EXPECT_EQ(slurp(dir_ / "one" / "sim_summary.csv"), slurp(dir_ / "eight" / "sim_summary.csv"));
    EXPECT_EQ(slurp(dir_ / "one" / "sim_gates.csv"), slurp(dir_ / "eight" / "sim_gates.csv"));
}

TEST_F(CliTest, SimulateRejectsBadDeviation)
{
    RunConfig cfg = config(ModelKind::RiskNeutral, {2});
    cfg.deviation = Deviation{3, 1.2};
    EXPECT_EQ(cmd_simulate(cfg, log_), kExitValidation);
}

TEST_F(CliTest, FiguresWriteEveryPanel)
{
    ASSERT_EQ(cmd_figures(config(ModelKind::RiskNeutral, {}), log_), kExitOk);
    for (const auto& id : all_figure_ids()) {
        EXPECT_TRUE(fs::exists(dir_ / ("fig" + id + ".csv"))) << id;
        const std::string svg = slurp(dir_ / ("fig" + id + ".svg"));
        EXPECT_NE(svg.find("viewBox=\"0 0 800 600\""), std::string::npos) << id;
        EXPECT_NE(svg.find("<polyline"), std::string::npos) << id;
        EXPECT_EQ(svg.find("href"), std::string::npos) << id;
    }
    EXPECT_EQ(all_figure_ids().size(), 21u);

    const report::CsvTable fig1a = report::read_csv(dir_ / "fig1a.csv");
    EXPECT_EQ(fig1a.header, (std::vector<std::string>{"t", "N5", "N20", "N100"}));
    EXPECT_EQ(cell(fig1a, 0, "t"), 0.0);
    EXPECT_EQ(cell(fig1a, fig1a.rows.size() - 1, "t"), 1.0);

    const report::CsvTable fig4 = report::read_csv(dir_ / "fig4b.csv");
    EXPECT_EQ(fig4.header, (std::vector<std::string>{"t", "kyle", "neutral"}));
    EXPECT_EQ(fig4.rows.size(), 20u);

    const report::CsvTable fig8b = report::read_csv(dir_ / "fig8b.csv");
    EXPECT_EQ(fig8b.header, (std::vector<std::string>{"t", "discrete_N20", "limit"}));
    for (std::size_t r = 1; r + 1 < fig8b.rows.size(); ++r) {
        const double t = cell(fig8b, r, "t");
        EXPECT_NEAR(cell(fig8b, r, "limit"), std::cbrt(1 - t), 1e-15);
    }
}

TEST_F(CliTest, FigureSelection)
{
    RunConfig cfg = config(ModelKind::RiskNeutral, {});
    cfg.figures = {"7", "4a"};
    ASSERT_EQ(cmd_figures(cfg, log_), kExitOk);
    EXPECT_TRUE(fs::exists(dir_ / "fig7a.svg"));
    EXPECT_TRUE(fs::exists(dir_ / "fig7b.svg"));
    EXPECT_TRUE(fs::exists(dir_ / "fig4a.svg"));
    EXPECT_FALSE(fs::exists(dir_ / "fig1a.svg"));
    cfg.figures = {"11"};
    EXPECT_EQ(cmd_figures(cfg, log_), kExitValidation);
}

TEST_F(CliTest, LimitsNeutralThousandPeriods)
{
    ASSERT_EQ(cmd_limits(config(ModelKind::RiskNeutral, {1000}), log_), kExitOk);
    const report::CsvTable t = report::read_csv(dir_ / "limits.csv");
    bool found = false;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.rows[r][0] == "sigma" && cell(t, r, "t") == 0.5) {
            EXPECT_LT(cell(t, r, "rel_error"), 0.01);
            EXPECT_EQ(t.rows[r][t.column("index")], "500");
            found = true;
        }
    }
    EXPECT_TRUE(found);
}

TEST_F(CliTest, LimitsSeekingLambda)
{
    ASSERT_EQ(cmd_limits(config(ModelKind::RiskSeeking, {1000}), log_), kExitOk);
    const report::CsvTable t = report::read_csv(dir_ / "limits.csv");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.rows[r][0] == "lambda" && cell(t, r, "t") == 0.5) {
            EXPECT_LT(cell(t, r, "rel_error"), 0.02);
        }
    }
}

TEST_F(CliTest, LimitsAverseWritesBoundsTable)
{
    ASSERT_EQ(cmd_limits(config(ModelKind::RiskAverse, {100}), log_), kExitOk);
    const report::CsvTable b = report::read_csv(dir_ / "sigma_bounds.csv");
    EXPECT_EQ(b.rows.size(), 99u);
    for (std::size_t r = 0; r < b.rows.size(); ++r) {
        EXPECT_EQ(b.rows[r][b.column("within_envelope")], "true");
        const double s = cell(b, r, "sigma");
        const bool within = cell(b, r, "lower") < s && s < cell(b, r, "upper");
        EXPECT_EQ(b.rows[r][b.column("within")], within ? "true" : "false");
    }
}

TEST_F(CliTest, CommandsAreDeterministic)
{
    RunConfig cfg = config(ModelKind::RiskSeeking, {});
    cfg.out_dir = dir_ / "a";
    ASSERT_EQ(cmd_figures(cfg, log_), kExitOk);
    cfg.out_dir = dir_ / "b";
    ASSERT_EQ(cmd_figures(cfg, log_), kExitOk);
    for (const auto& id : all_figure_ids()) {
        EXPECT_EQ(slurp(dir_ / "a" / ("fig" + id + ".svg")), slurp(dir_ / "b" / ("fig" + id + ".svg")));
        EXPECT_EQ(slurp(dir_ / "a" / ("fig" + id + ".csv")), slurp(dir_ / "b" / ("fig" + id + ".csv")));
    }
}
