// Command-line front end: solve | simulate | figures | limits.
#include "insider/cli.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

using insider::cli::RunConfig;

struct Flags {
    std::optional<std::string> config;
    std::map<std::string, std::string> values;  // key -> raw text, applied after the config file
};

void add_common(CLI::App& cmd, Flags& flags)
{
    cmd.add_option("--config", flags.config, "key=value configuration file");
    const std::pair<const char*, const char*> options[] = {
        {"model", "kyle | averse | neutral | seeking"},
        {"periods", "number of periods N (comma list allowed)"},
        {"sigma0", "prior variance Sigma_0"},
        {"sigma-u", "noise-trader volatility"},
        {"p0", "initial price"},
        {"paths", "Monte Carlo paths"},
        {"seed", "Monte Carlo seed"},
        {"threads", "OpenMP threads (0: runtime default)"},
        {"out", "output directory"},
        {"grid", "limits: evaluate at t = j/grid"},
        {"figures", "figure panels, e.g. 1a,7 (default all)"},
        {"deviation-period", "period whose intensity is scaled"},
        {"deviation-mult", "intensity multiplier"},
        {"offset-lag", "coefficient on last period's order flow"},
        {"offset-const", "constant added to every order"},
    };
    for (const auto& [key, help] : options) {
        const std::string name = key;
        cmd.add_option_function<std::string>(
            "--" + name, [&flags, name](const std::string& v) { flags.values[name] = v; }, help);
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Insider trading equilibria: solve, simulate, plot, compare with limits"};
    app.require_subcommand(1);

    using Command = std::function<int(const RunConfig&, std::ostream&)>;
    const std::pair<const char*, Command> commands[] = {
        {"solve", insider::cli::cmd_solve},
        {"simulate", insider::cli::cmd_simulate},
        {"figures", insider::cli::cmd_figures},
        {"limits", insider::cli::cmd_limits},
    };
    const char* descriptions[] = {
        "write coefficients.csv and path.csv",
        "Monte Carlo market simulation with statistical gates",
        "write figure CSV and SVG files",
        "compare discrete paths with continuous-trading limits",
    };

    Flags flags;
    std::map<std::string, Command> by_name;
    for (std::size_t i = 0; i < std::size(commands); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i].first, descriptions[i]);
        add_common(*sub, flags);
        by_name[commands[i].first] = commands[i].second;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : insider::cli::kExitValidation;
    }

    RunConfig cfg;
    try {
        if (flags.config) insider::cli::apply_config_file(cfg, *flags.config);
        for (const auto& [key, value] : flags.values) insider::cli::set_option(cfg, key, value);
    } catch (const insider::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return insider::cli::exit_code_for(e);
    }

    const std::string name = app.get_subcommands().front()->get_name();
    return by_name.at(name)(cfg, std::cout);
}
