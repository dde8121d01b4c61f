#pragma once

// Batch commands behind the `insider` executable. Each command takes a fully
// resolved RunConfig, writes its files under RunConfig::out_dir and returns a
// process exit code.

#include "insider/core.hpp"
#include "insider/report.hpp"
#include "insider/simulate.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace insider::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitGateFailure = 2,
    kExitIo = 3,
};

struct RunConfig {
    ModelKind model = ModelKind::RiskNeutral;
    std::vector<int> periods;  // empty: command default
    double sigma0_sq = 1.0;
    double sigma_u = 0.5;
    double p0 = 0.0;
    std::int64_t n_paths = 100'000;
    std::uint64_t seed = 1;
    int threads = 0;
    std::filesystem::path out_dir = ".";
    int grid = 10;                     // limits: t = j / grid, j = 1..grid-1
    std::vector<std::string> figures;  // empty or "all": every figure
    std::optional<Deviation> deviation;
    std::optional<Offset> offset;

    MarketParams params(int n_periods) const;
};

/// Applies one `key=value` setting. Keys are the long flag names without
/// dashes: model, periods, sigma0, sigma-u, p0, paths, seed, threads, out,
/// grid, figures, deviation-period, deviation-mult, offset-lag, offset-const.
void set_option(RunConfig& cfg, std::string_view key, std::string_view value);

/// Reads a flat key=value file ('#' starts a comment) into cfg.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& file);

std::vector<int> parse_int_list(std::string_view text);

/// coefficients.csv (n,a,b,c) and path.csv (n,beta,lambda,sigma,alpha,delta);
/// cells outside a quantity's index range are empty.
report::CsvTable coefficients_table(const CoefficientPath& coeffs);
report::CsvTable path_table(const EquilibriumPath& path);
CoefficientPath read_coefficients_csv(const std::filesystem::path& file, ModelKind model);

int cmd_solve(const RunConfig& cfg, std::ostream& log);
int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_figures(const RunConfig& cfg, std::ostream& log);
int cmd_limits(const RunConfig& cfg, std::ostream& log);

/// Maps an Error to the documented exit code.
int exit_code_for(const Error& error);

/// Identifiers of every figure panel: "1a", "1b", ..., "4a", "4b", "4c", ..., "10b".
std::vector<std::string> all_figure_ids();

}  // namespace insider::cli
