#include "insider/cli.hpp"

#include "insider/path.hpp"
#include "insider/recursion.hpp"
#include "insider/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>

namespace insider::cli {

namespace fs = std::filesystem;
using report::CsvTable;
using report::format_double;

MarketParams RunConfig::params(int n_periods) const
{
    return validate(MarketParams{sigma0_sq, sigma_u, n_periods, p0});
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view text)
{
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::InvalidArgument,
                    "option '" + std::string(key) + "' expects an integer, got '" + std::string(text) + "'");
    }
    return value;
}

double parse_real(std::string_view key, std::string_view text)
{
    try {
        return report::parse_double(text);
    } catch (const Error&) {
        throw Error(ErrorCode::InvalidArgument,
                    "option '" + std::string(key) + "' expects a number, got '" + std::string(text) + "'");
    }
}

std::vector<std::string> split_list(std::string_view text)
{
    std::vector<std::string> out;
    while (!text.empty()) {
        const std::size_t comma = text.find(',');
        const std::string_view item = trim(text.substr(0, comma));
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

}  // namespace

std::vector<int> parse_int_list(std::string_view text)
{
    std::vector<int> out;
    for (const auto& item : split_list(text)) out.push_back(parse_int<int>("periods", item));
    if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty period list");
    return out;
}

void set_option(RunConfig& cfg, std::string_view key, std::string_view value)
{
    value = trim(value);
    if (key == "model") {
        cfg.model = parse_model(value);
    } else if (key == "periods") {
        cfg.periods = parse_int_list(value);
    } else if (key == "sigma0") {
        cfg.sigma0_sq = parse_real(key, value);
    } else if (key == "sigma-u") {
        cfg.sigma_u = parse_real(key, value);
    } else if (key == "p0") {
        cfg.p0 = parse_real(key, value);
    } else if (key == "paths") {
        cfg.n_paths = parse_int<std::int64_t>(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_int<std::uint64_t>(key, value);
    } else if (key == "threads") {
        cfg.threads = parse_int<int>(key, value);
    } else if (key == "out") {
        cfg.out_dir = fs::path(std::string(value));
    } else if (key == "grid") {
        cfg.grid = parse_int<int>(key, value);
    } else if (key == "figures") {
        cfg.figures = split_list(value);
    } else if (key == "deviation-period") {
        if (!cfg.deviation) cfg.deviation = Deviation{};
        cfg.deviation->period = parse_int<int>(key, value);
    } else if (key == "deviation-mult") {
        if (!cfg.deviation) cfg.deviation = Deviation{};
        cfg.deviation->multiplier = parse_real(key, value);
    } else if (key == "offset-lag") {
        if (!cfg.offset) cfg.offset = Offset{};
        cfg.offset->lag = parse_real(key, value);
    } else if (key == "offset-const") {
        if (!cfg.offset) cfg.offset = Offset{};
        cfg.offset->constant = parse_real(key, value);
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown option '" + std::string(key) + "'");
    }
}

void apply_config_file(RunConfig& cfg, const fs::path& file)
{
    std::ifstream is(file);
    if (!is) throw Error(ErrorCode::Io, "cannot open config file " + file.string());
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::InvalidArgument,
                        file.string() + ":" + std::to_string(line_no) + ": expected key=value");
        }
        set_option(cfg, trim(view.substr(0, eq)), view.substr(eq + 1));
    }
}

int exit_code_for(const Error& error)
{
    return error.code() == ErrorCode::Io ? kExitIo : kExitValidation;
}

// ---------------------------------------------------------------------------
// solve

CsvTable coefficients_table(const CoefficientPath& coeffs)
{
    const int n_periods = coeffs.n_periods();
    CsvTable t{{"n", "a", "b", "c"}, {}};
    for (int n = 0; n <= n_periods; ++n) {
        t.rows.push_back({std::to_string(n), n < n_periods ? format_double(coeffs.a[n]) : "",
                          n < n_periods ? format_double(coeffs.b[n]) : "",
                          n >= 1 ? format_double(coeffs.c[n]) : ""});
    }
    return t;
}

CsvTable path_table(const EquilibriumPath& path)
{
    const int n_periods = path.n_periods();
    CsvTable t{{"n", "beta", "lambda", "sigma", "alpha", "delta"}, {}};
    for (int n = 0; n <= n_periods; ++n) {
        const bool has_flow = n >= 1;
        const bool has_value = n < n_periods;
        t.rows.push_back({std::to_string(n), has_flow ? format_double(path.beta[n]) : "",
                          has_flow ? format_double(path.lambda[n]) : "",
                          format_double(path.sigma[n]),
                          has_value ? format_double(path.alpha[n]) : "",
                          has_value ? format_double(path.delta[n]) : ""});
    }
    return t;
}

CoefficientPath read_coefficients_csv(const fs::path& file, ModelKind model)
{
    const CsvTable t = report::read_csv(file);
    const std::size_t col_a = t.column("a");
    const std::size_t col_b = t.column("b");
    const std::size_t col_c = t.column("c");
    const int n_periods = static_cast<int>(t.rows.size()) - 1;
    if (n_periods < 1) throw Error(ErrorCode::InvalidArgument, file.string() + " has no periods");

    CoefficientPath out;
    out.model = model;
    out.a = Series<0>(n_periods - 1);
    out.b = Series<0>(n_periods - 1);
    out.c = Series<1>(n_periods);
    for (int n = 0; n <= n_periods; ++n) {
        const auto& row = t.rows[static_cast<std::size_t>(n)];
        if (n < n_periods) {
            out.a[n] = report::parse_double(row.at(col_a));
            out.b[n] = report::parse_double(row.at(col_b));
        }
        if (n >= 1) out.c[n] = report::parse_double(row.at(col_c));
    }
    return out;
}

namespace {

fs::path output_dir_for(const RunConfig& cfg, int n_periods, std::size_t n_runs)
{
    fs::path dir = n_runs > 1 ? cfg.out_dir / ("N" + std::to_string(n_periods)) : cfg.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

template <class Fn>
int guarded(std::ostream& log, Fn&& fn)
{
    try {
        return fn();
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace

int cmd_solve(const RunConfig& cfg, std::ostream& log)
{
    return guarded(log, [&] {
        const std::vector<int> periods = cfg.periods.empty() ? std::vector<int>{20} : cfg.periods;
        for (int n_periods : periods) {
            const MarketParams params = cfg.params(n_periods);
            const CoefficientPath coeffs = solve(cfg.model, params);
            const EquilibriumPath path = build_path(coeffs, params);
            const fs::path dir = output_dir_for(cfg, n_periods, periods.size());
            report::write_csv(dir / "coefficients.csv", coefficients_table(coeffs));
            report::write_csv(dir / "path.csv", path_table(path));
            log << to_string(cfg.model) << " N=" << n_periods << ": a0=" << format_double(coeffs.a[0])
                << " b0=" << format_double(coeffs.b[0])
                << " ex-ante=" << format_double(path.alpha[0] * path.sigma[0] + path.delta[0])
                << (path.sigma_underflow ? " (Sigma underflow clamped)" : "") << " -> " << dir.string()
                << '\n';
        }
        return static_cast<int>(kExitOk);
    });
}

// ---------------------------------------------------------------------------
// simulate

namespace {

struct Gate {
    std::string name;
    int period;
    double value;
    double expected;
    double std_error;
    double limit_se;

    double z() const { return std_error > 0 ? (value - expected) / std_error : 0.0; }
    bool pass() const { return std::abs(value - expected) <= limit_se * std_error; }
};

constexpr double kProfitSe = 3.0;
constexpr double kStatSe = 4.0;

std::vector<Gate> simulation_gates(const EquilibriumPath& eq, const MarketParams& params,
                                   const SimConfig& sim, const SimSummary& summary)
{
    const StrategySchedule sched = make_schedule(eq, params, sim);
    const int n_periods = eq.n_periods();
    std::vector<Gate> gates;

    if (!sim.deviation) {
        const double expected = eq.alpha[0] * eq.sigma[0] + eq.delta[0];
        gates.push_back({"total_profit", 0, summary.total_profit.mean, expected,
                         summary.total_profit.std_error, kProfitSe});
    } else {
        const int m = sim.deviation->period;
        const Continuation next = continuation_from_path(eq, params, m);
        const DeviationEval analytic = deviation_eval(eq.model, sim.deviation->multiplier * eq.beta[m],
                                                      next.a, next.b, eq.sigma[m - 1], params);
        gates.push_back({"deviation_profit", m, summary.deviation_profit->mean, analytic.ex_ante,
                         summary.deviation_profit->std_error, kStatSe});
    }
    for (int n = 0; n <= n_periods; ++n) {
        gates.push_back({"sq_error", n, summary.sq_error[n].mean, sched.sigma[n],
                         summary.sq_error[n].std_error, kStatSe});
    }
    for (const auto& cov : summary.covariances) {
        gates.push_back({"cov_err_flow_k" + std::to_string(cov.flow_index), cov.period,
                         cov.value.mean, 0.0, cov.value.std_error, kStatSe});
    }
    if (!sim.offset) {
        const double inv_root_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
        for (int n = 1; n <= n_periods; ++n) {
            gates.push_back({"half_volume", n, summary.half_volume[n].mean,
                             sched.beta[n] * std::sqrt(sched.sigma[n - 1]) * inv_root_2pi,
                             summary.half_volume[n].std_error, kStatSe});
        }
    } else {
        gates.push_back({"offset_profit_delta", 0, summary.offset_profit_delta->mean, 0.0,
                         summary.offset_profit_delta->std_error, kStatSe});
    }
    return gates;
}

CsvTable summary_table(const SimSummary& s)
{
    CsvTable t{{"statistic", "period", "value", "std_error"}, {}};
    auto add = [&](const std::string& name, const std::string& period, const Estimate& e) {
        t.rows.push_back({name, period, format_double(e.mean), format_double(e.std_error)});
    };
    add("total_profit", "", s.total_profit);
    if (s.deviation_profit) add("deviation_profit", "", *s.deviation_profit);
    if (s.offset_profit_delta) add("offset_profit_delta", "", *s.offset_profit_delta);
    for (int n = 0; n <= s.sq_error.last(); ++n) add("sq_error", std::to_string(n), s.sq_error[n]);
    for (int n = 1; n <= s.half_volume.last(); ++n) {
        add("half_volume", std::to_string(n), s.half_volume[n]);
    }
    for (const auto& c : s.covariances) {
        add("cov_err_flow_k" + std::to_string(c.flow_index), std::to_string(c.period), c.value);
    }
    t.rows.push_back({"path_count", "", std::to_string(s.n_paths), ""});
    t.rows.push_back({"seed", "", std::to_string(s.seed), ""});
    return t;
}

CsvTable gates_table(const std::vector<Gate>& gates)
{
    CsvTable t{{"gate", "period", "value", "expected", "std_error", "z", "limit_se", "pass"}, {}};
    for (const auto& g : gates) {
        t.rows.push_back({g.name, std::to_string(g.period), format_double(g.value),
                          format_double(g.expected), format_double(g.std_error), format_double(g.z()),
                          format_double(g.limit_se), g.pass() ? "true" : "false"});
    }
    return t;
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, std::ostream& log)
{
    return guarded(log, [&] {
        const std::vector<int> periods = cfg.periods.empty() ? std::vector<int>{5} : cfg.periods;
        bool all_pass = true;
        for (int n_periods : periods) {
            const MarketParams params = cfg.params(n_periods);
            const EquilibriumPath eq = build_path(solve(cfg.model, params), params);
            SimConfig sim;
            sim.n_paths = cfg.n_paths;
            sim.seed = cfg.seed;
            sim.model = cfg.model;
            sim.deviation = cfg.deviation;
            sim.offset = cfg.offset;
            sim.threads = cfg.threads;
            validate(sim, n_periods);

            const SimSummary summary = simulate_market(eq, params, sim);
            const std::vector<Gate> gates = simulation_gates(eq, params, sim, summary);
            const fs::path dir = output_dir_for(cfg, n_periods, periods.size());
            report::write_csv(dir / "sim_summary.csv", summary_table(summary));
            report::write_csv(dir / "sim_gates.csv", gates_table(gates));

            const auto failed = std::count_if(gates.begin(), gates.end(), [](const Gate& g) { return !g.pass(); });
            log << to_string(cfg.model) << " N=" << n_periods << " paths=" << summary.n_paths
                << " seed=" << summary.seed << ": mean profit "
                << format_double(summary.total_profit.mean) << " (se "
                << format_double(summary.total_profit.std_error) << "), " << gates.size() - failed
                << "/" << gates.size() << " gates pass\n";
            for (const auto& g : gates) {
                if (!g.pass()) {
                    log << "  FAIL " << g.name << " period " << g.period << ": value "
                        << format_double(g.value) << " expected " << format_double(g.expected)
                        << " z=" << format_double(g.z()) << " (limit " << g.limit_se << " SE)\n";
                }
            }
            all_pass = all_pass && failed == 0;
        }
        return static_cast<int>(all_pass ? kExitOk : kExitGateFailure);
    });
}

// ---------------------------------------------------------------------------
// figures

namespace {

enum class Quantity { Sigma, Lambda, Beta };

struct NamedSeries {
    std::string name;
    std::vector<double> t;
    std::vector<double> y;
};

NamedSeries discrete_series(const std::string& name, const EquilibriumPath& path, Quantity q)
{
    const int n_periods = path.n_periods();
    const double N = static_cast<double>(n_periods);
    NamedSeries s{name, {}, {}};
    const int first = q == Quantity::Sigma ? 0 : 1;
    for (int n = first; n <= n_periods; ++n) {
        s.t.push_back(static_cast<double>(n) / N);
        s.y.push_back(q == Quantity::Sigma ? path.sigma[n]
                      : q == Quantity::Lambda ? path.lambda[n]
                                              : path.beta[n]);
    }
    return s;
}

// Approximation to the discrete path at N built from the continuous-trading limits.
// averse: the limiting scaled c is plugged back into the discrete recursion
// (its own Sigma and lambda limits are degenerate); other models use the
// closed-form Sigma, lambda and dt * beta-rate limits at interior t = n/N.
NamedSeries limit_series(ModelKind model, const MarketParams& params, Quantity q)
{
    const int n_periods = params.n_periods;
    const double N = static_cast<double>(n_periods);
    NamedSeries s{"limit", {}, {}};
    std::vector<double> grid;
    for (int n = 1; n < n_periods; ++n) grid.push_back(static_cast<double>(n) / N);
    const LimitCurves lim = limit_curves(model, params, grid);

    if (model != ModelKind::RiskAverse) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            s.t.push_back(grid[i]);
            s.y.push_back(q == Quantity::Sigma ? lim.sigma_lim[i]
                          : q == Quantity::Lambda ? lim.lambda_lim[i]
                                                  : params.dt() * lim.beta_rate_lim[i]);
        }
        return s;
    }

    CoefficientPath approx;
    approx.model = model;
    approx.a = Series<0>(n_periods - 1);
    approx.b = Series<0>(n_periods - 1);
    approx.c = Series<1>(n_periods);
    const double scale = std::pow(params.dt(), 0.25);
    for (int n = 1; n < n_periods; ++n) approx.c[n] = scale * lim.c_scaled[static_cast<std::size_t>(n - 1)];
    approx.c[n_periods] = 1.0;
    const NamedSeries full = discrete_series("limit", build_path(approx, params), q);
    return full;
}

struct FigurePanel {
    std::string id;
    std::string title;
    std::string y_label;
    std::vector<NamedSeries> series;
};

std::string quantity_label(Quantity q)
{
    return q == Quantity::Sigma ? "Sigma_n" : q == Quantity::Lambda ? "lambda_n" : "beta_n";
}

std::string quantity_title(Quantity q)
{
    return q == Quantity::Sigma ? "Unrevealed information"
           : q == Quantity::Lambda ? "Liquidity parameter"
                                   : "Trading intensity";
}

EquilibriumPath solved_path(ModelKind model, const MarketParams& params)
{
    return build_path(solve(model, params), params);
}

FigurePanel make_panel(const std::string& id, const RunConfig& cfg)
{
    static const std::map<int, std::pair<ModelKind, Quantity>> kSingleModel = {
        {1, {ModelKind::RiskAverse, Quantity::Sigma}},  {2, {ModelKind::RiskAverse, Quantity::Lambda}},
        {3, {ModelKind::RiskAverse, Quantity::Beta}},   {5, {ModelKind::RiskNeutral, Quantity::Sigma}},
        {6, {ModelKind::RiskNeutral, Quantity::Lambda}}, {7, {ModelKind::RiskNeutral, Quantity::Beta}},
        {8, {ModelKind::RiskSeeking, Quantity::Sigma}}, {9, {ModelKind::RiskSeeking, Quantity::Lambda}},
        {10, {ModelKind::RiskSeeking, Quantity::Beta}}};
    // N used by the limit-comparison panels.
    static const std::map<int, int> kLimitPeriods = {{1, 1000}, {2, 1000}, {3, 50},  {5, 100}, {6, 100},
                                                     {7, 100},  {8, 20},   {9, 20}, {10, 20}};

    const int number = std::stoi(id);
    const char panel = id.back();

    if (number == 4) {
        const Quantity q = panel == 'a' ? Quantity::Sigma : panel == 'b' ? Quantity::Lambda : Quantity::Beta;
        const MarketParams params = cfg.params(20);
        FigurePanel fig{id, quantity_title(q) + ": risk-neutral vs kyle baseline, N=20", quantity_label(q), {}};
        fig.series.push_back(discrete_series("kyle", solved_path(ModelKind::KyleBaseline, params), q));
        fig.series.push_back(discrete_series("neutral", solved_path(ModelKind::RiskNeutral, params), q));
        return fig;
    }

    const auto [model, q] = kSingleModel.at(number);
    const std::string model_name(to_string(model));
    if (panel == 'a') {
        const std::vector<int> periods = cfg.periods.empty() ? std::vector<int>{5, 20, 100} : cfg.periods;
        FigurePanel fig{id, quantity_title(q) + " (" + model_name + ")", quantity_label(q), {}};
        for (int n_periods : periods) {
            const MarketParams params = cfg.params(n_periods);
            fig.series.push_back(discrete_series("N" + std::to_string(n_periods), solved_path(model, params), q));
        }
        return fig;
    }
    const int n_periods = kLimitPeriods.at(number);
    const MarketParams params = cfg.params(n_periods);
    FigurePanel fig{id, quantity_title(q) + " (" + model_name + "): discrete vs limit, N=" + std::to_string(n_periods),
                    quantity_label(q), {}};
    fig.series.push_back(discrete_series("discrete_N" + std::to_string(n_periods), solved_path(model, params), q));
    fig.series.push_back(limit_series(model, params, q));
    return fig;
}

// Rows on the union of all series' time points; cells are empty where a
// series has no point at that t.
CsvTable panel_table(const FigurePanel& fig)
{
    std::vector<double> times;
    for (const auto& s : fig.series) times.insert(times.end(), s.t.begin(), s.t.end());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    CsvTable t;
    t.header.push_back("t");
    for (const auto& s : fig.series) t.header.push_back(s.name);
    t.rows.assign(times.size(), std::vector<std::string>(fig.series.size() + 1));
    for (std::size_t r = 0; r < times.size(); ++r) t.rows[r][0] = format_double(times[r]);
    for (std::size_t k = 0; k < fig.series.size(); ++k) {
        const auto& s = fig.series[k];
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            const auto it = std::lower_bound(times.begin(), times.end(), s.t[i]);
            t.rows[static_cast<std::size_t>(it - times.begin())][k + 1] = format_double(s.y[i]);
        }
    }
    return t;
}

}  // namespace

std::vector<std::string> all_figure_ids()
{
    std::vector<std::string> ids;
    for (int f = 1; f <= 10; ++f) {
        if (f == 4) {
            for (const char* p : {"4a", "4b", "4c"}) ids.emplace_back(p);
        } else {
            ids.push_back(std::to_string(f) + "a");
            ids.push_back(std::to_string(f) + "b");
        }
    }
    return ids;
}

int cmd_figures(const RunConfig& cfg, std::ostream& log)
{
    return guarded(log, [&] {
        const std::vector<std::string> known = all_figure_ids();
        std::vector<std::string> ids;
        if (cfg.figures.empty() || (cfg.figures.size() == 1 && cfg.figures[0] == "all")) {
            ids = known;
        } else {
            for (const auto& req : cfg.figures) {
                // "7" selects both panels of figure 7.
                bool matched = false;
                for (const auto& id : known) {
                    if (id == req || id.substr(0, id.size() - 1) == req) {
                        ids.push_back(id);
                        matched = true;
                    }
                }
                if (!matched) throw Error(ErrorCode::InvalidArgument, "unknown figure '" + req + "'");
            }
        }

        std::error_code ec;
        fs::create_directories(cfg.out_dir, ec);
        if (ec) throw Error(ErrorCode::Io, "cannot create " + cfg.out_dir.string());
        for (const auto& id : ids) {
            const FigurePanel fig = make_panel(id, cfg);
            report::write_csv(cfg.out_dir / ("fig" + id + ".csv"), panel_table(fig));
            report::Chart chart{"Figure " + id + ": " + fig.title, "t", fig.y_label, {}};
            for (const auto& s : fig.series) chart.series.push_back({s.name, s.t, s.y});
            report::write_text(cfg.out_dir / ("fig" + id + ".svg"), report::render_svg(chart));
            log << "fig" << id << ": " << fig.title << '\n';
        }
        return static_cast<int>(kExitOk);
    });
}

// ---------------------------------------------------------------------------
// limits

namespace {

double relative_error(double discrete, double limit)
{
    if (!std::isfinite(limit) || limit == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::abs(discrete - limit) / std::abs(limit);
}

}  // namespace

int cmd_limits(const RunConfig& cfg, std::ostream& log)
{
    return guarded(log, [&] {
        if (cfg.grid < 2) throw Error(ErrorCode::InvalidArgument, "grid must be >= 2");
        const std::vector<int> periods = cfg.periods.empty() ? std::vector<int>{1000} : cfg.periods;
        std::vector<double> grid;
        for (int j = 1; j < cfg.grid; ++j) grid.push_back(static_cast<double>(j) / cfg.grid);

        for (int n_periods : periods) {
            const MarketParams params = cfg.params(n_periods);
            const CoefficientPath coeffs = solve(cfg.model, params);
            const EquilibriumPath path = build_path(coeffs, params);
            const LimitCurves lim = limit_curves(cfg.model, params, grid);
            const double dt = params.dt();
            const double power = coefficient_scaling_power(cfg.model);
            const double dt_p = std::pow(dt, power);

            CsvTable table{{"quantity", "t", "index", "limit", "discrete", "abs_error", "rel_error"}, {}};
            double worst_sigma = 0.0;
            auto add = [&](const char* name, double t, int index, double limit, double discrete) {
                const double abs_err = std::abs(discrete - limit);
                table.rows.push_back({name, format_double(t), std::to_string(index), format_double(limit),
                                      format_double(discrete), format_double(abs_err),
                                      format_double(relative_error(discrete, limit))});
            };
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double t = grid[i];
                const int idx = discrete_index(n_periods, t);
                // beta, lambda, c live on 1..N; a, b on 0..N-1.
                const int flow_idx = std::clamp(idx, 1, n_periods);
                const int value_idx = std::clamp(idx, 0, n_periods - 1);
                add("sigma", t, idx, lim.sigma_lim[i], path.sigma[idx]);
                add("lambda", t, flow_idx, lim.lambda_lim[i], path.lambda[flow_idx]);
                add("beta_rate", t, flow_idx, lim.beta_rate_lim[i], path.beta[flow_idx] / dt);
                add("c_scaled", t, flow_idx, lim.c_scaled[i], coeffs.c[flow_idx] / dt_p);
                add("b_scaled", t, value_idx, lim.b_scaled[i], coeffs.b[value_idx] * dt_p);
                add("a_scaled", t, value_idx, lim.a_scaled[i], coeffs.a[value_idx] * dt_p);
                add("b_over_a", t, value_idx, lim.b_scaled[i] / lim.a_scaled[i],
                    coeffs.b[value_idx] / coeffs.a[value_idx]);
                if (cfg.model != ModelKind::RiskAverse) {
                    worst_sigma = std::max(worst_sigma, relative_error(path.sigma[idx], lim.sigma_lim[i]));
                }
            }
            const fs::path dir = output_dir_for(cfg, n_periods, periods.size());
            report::write_csv(dir / "limits.csv", table);
            log << to_string(cfg.model) << " N=" << n_periods << ": limits.csv written";
            if (cfg.model != ModelKind::RiskAverse) {
                log << ", max relative Sigma error " << format_double(worst_sigma);
            }
            log << '\n';

            if (cfg.model == ModelKind::RiskAverse && n_periods >= 2) {
                const SigmaBounds bounds = sigma_bounds_model1(params, coeffs.c[1], coeffs.c[n_periods - 1]);
                const SigmaEnvelope env = sigma_envelope_per_period(coeffs, params);
                CsvTable bt{{"n", "t", "sigma", "lower", "upper", "within", "envelope_lower",
                             "envelope_upper", "within_envelope"},
                            {}};
                int inside = 0;
                int inside_env = 0;
                for (int n = 1; n < n_periods; ++n) {
                    const double s = path.sigma[n];
                    const bool within = bounds.lower < s && s < bounds.upper;
                    const bool within_env = env.lower[n] <= s && s <= env.upper[n];
                    inside += within;
                    inside_env += within_env;
                    bt.rows.push_back({std::to_string(n), format_double(n * dt), format_double(s),
                                       format_double(bounds.lower), format_double(bounds.upper),
                                       within ? "true" : "false", format_double(env.lower[n]),
                                       format_double(env.upper[n]), within_env ? "true" : "false"});
                }
                report::write_csv(dir / "sigma_bounds.csv", bt);
                log << "  Sigma_n inside the 1/dt-exponent bounds for " << inside << "/" << n_periods - 1
                    << " interior periods; inside the per-period envelope for " << inside_env << "/"
                    << n_periods - 1 << '\n';
            }
        }
        return static_cast<int>(kExitOk);
    });
}

}  // namespace insider::cli
