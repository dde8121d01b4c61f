#include "insider/simulate.hpp"

#include "insider/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <omp.h>

namespace insider {

void validate(const SimConfig& cfg, int n_periods)
{
    if (cfg.n_paths < 1) {
        throw Error(ErrorCode::InvalidArgument, "n_paths must be >= 1");
    }
    if (cfg.deviation) {
        if (cfg.deviation->period < 1 || cfg.deviation->period > n_periods) {
            throw Error(ErrorCode::InvalidArgument,
                        "deviation period must lie in [1, " + std::to_string(n_periods) + "]");
        }
        if (!(cfg.deviation->multiplier > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "deviation multiplier must be > 0");
        }
    }
    if (cfg.offset && !(std::isfinite(cfg.offset->lag) && std::isfinite(cfg.offset->constant))) {
        throw Error(ErrorCode::InvalidArgument, "offset coefficients must be finite");
    }
}

StrategySchedule make_schedule(const EquilibriumPath& eq, const MarketParams& params,
                               const SimConfig& cfg)
{
    const int n_periods = eq.n_periods();
    StrategySchedule sched{eq.beta, eq.lambda, eq.sigma};
    if (!cfg.deviation) return sched;

    const int m = cfg.deviation->period;
    const double prev = eq.sigma[m - 1];
    const double beta_dev = cfg.deviation->multiplier * eq.beta[m];
    const double q = params.sigma_u * params.sigma_u * params.dt();
    sched.beta[m] = beta_dev;
    sched.lambda[m] = efficient_lambda(beta_dev, prev, params);
    sched.sigma[m] = prev * q / (beta_dev * beta_dev * prev + q);

    // Later periods keep the equilibrium coefficients c_k; since
    // Sigma_k / Sigma_{k-1} = 1 / (1 + c_k^2) does not depend on the level,
    // the post-deviation variances are the equilibrium ones times a constant r,
    // so beta_k scales by r^{-1/2} and lambda_k by r^{1/2}.
    const double ratio = sched.sigma[m] / eq.sigma[m];
    const double root = std::sqrt(ratio);
    for (int k = m + 1; k <= n_periods; ++k) {
        sched.beta[k] = eq.beta[k] / root;
        sched.lambda[k] = eq.lambda[k] * root;
        sched.sigma[k] = eq.sigma[k] * ratio;
    }
    return sched;
}

namespace {

constexpr std::int64_t kBlockPaths = 1024;
constexpr std::int64_t kBlocksPerBatch = 256;

struct Layout {
    int n_periods;
    bool covariances;

    static constexpr std::size_t total = 0;
    static constexpr std::size_t deviation = 1;
    static constexpr std::size_t offset_delta = 2;
    std::size_t err(int n) const { return 3 + static_cast<std::size_t>(n); }
    std::size_t sq_err(int n) const { return err(n_periods) + 1 + static_cast<std::size_t>(n); }
    std::size_t flow(int k) const { return sq_err(n_periods) + static_cast<std::size_t>(k); }
    std::size_t half_volume(int n) const { return flow(n_periods) + static_cast<std::size_t>(n); }
    std::size_t product(int n, int k) const
    {
        const std::size_t tri = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
        return half_volume(n_periods) + 1 + tri + static_cast<std::size_t>(k - 1);
    }
    std::size_t size() const
    {
        const std::size_t np = static_cast<std::size_t>(n_periods);
        return half_volume(n_periods) + 1 + (covariances ? np * (np + 1) / 2 : 0);
    }
};

// Simulates one path and writes its observations into obs (size layout.size()).
class PathKernel {
public:
    PathKernel(const StrategySchedule& sched, const MarketParams& params, const SimConfig& cfg,
               const Layout& layout)
        : sched_(sched), params_(params), cfg_(cfg), layout_(layout),
          root_sigma0_(std::sqrt(params.sigma0_sq)), noise_(params.noise_scale()),
          deviation_period_(cfg.deviation ? cfg.deviation->period : 0)
    {
    }

    void operator()(std::int64_t path_index, double* obs) const
    {
        NormalStream stream = rng_substream(cfg_.seed, static_cast<std::uint64_t>(path_index));
        const double p0 = params_.p0;
        const double v = p0 + root_sigma0_ * stream.next();

        double price = p0;
        double flow_prev = 0.0;
        double total = 0.0;
        double offset_delta = 0.0;
        double deviation_profit = 0.0;
        obs[layout_.err(0)] = v - p0;
        obs[layout_.sq_err(0)] = (v - p0) * (v - p0);

        for (int n = 1; n <= layout_.n_periods; ++n) {
            const double noise = noise_ * stream.next();
            const double core = sched_.beta[n] * (v - price);
            const double predictable =
                cfg_.offset ? cfg_.offset->lag * flow_prev + cfg_.offset->constant : 0.0;
            const double order = core + predictable;
            const double flow = order + noise;
            price += sched_.lambda[n] * (flow - predictable);
            const double err = v - price;
            const double profit = order * err;

            total += profit;
            offset_delta += predictable * err;
            if (deviation_period_ > 0 && n >= deviation_period_) deviation_profit += profit;

            obs[layout_.err(n)] = err;
            obs[layout_.sq_err(n)] = err * err;
            obs[layout_.flow(n)] = flow;
            obs[layout_.half_volume(n)] = 0.5 * std::abs(order);
            flow_prev = flow;
        }
        obs[Layout::total] = total;
        obs[Layout::deviation] = deviation_profit;
        obs[Layout::offset_delta] = offset_delta;

        if (layout_.covariances) {
            for (int n = 1; n <= layout_.n_periods; ++n) {
                const double err = obs[layout_.err(n)];
                for (int k = 1; k <= n; ++k) {
                    obs[layout_.product(n, k)] = err * obs[layout_.flow(k)];
                }
            }
        }
    }

private:
    const StrategySchedule& sched_;
    const MarketParams& params_;
    const SimConfig& cfg_;
    const Layout& layout_;
    double root_sigma0_;
    double noise_;
    int deviation_period_;
};

// Count, means and centered second moments of every observation.
struct Moments {
    std::int64_t count = 0;
    std::vector<double> mean;
    std::vector<double> m2;

    explicit Moments(std::size_t m) : mean(m, 0.0), m2(m, 0.0) {}

    void push(const double* obs)
    {
        ++count;
        const double inv = 1.0 / static_cast<double>(count);
        for (std::size_t j = 0; j < mean.size(); ++j) {
            const double d = obs[j] - mean[j];
            mean[j] += d * inv;
            m2[j] += d * (obs[j] - mean[j]);
        }
    }

    // Pairwise (Chan et al.) merge; callers merge blocks in a fixed order.
    void merge(const Moments& other)
    {
        if (other.count == 0) return;
        const double na = static_cast<double>(count);
        const double nb = static_cast<double>(other.count);
        const double n = na + nb;
        for (std::size_t j = 0; j < mean.size(); ++j) {
            const double d = other.mean[j] - mean[j];
            mean[j] += d * nb / n;
            m2[j] += other.m2[j] + d * d * na * nb / n;
        }
        count += other.count;
    }

    double variance(std::size_t j) const
    {
        return count > 1 ? m2[j] / static_cast<double>(count - 1)
                         : std::numeric_limits<double>::quiet_NaN();
    }
};

Estimate estimate(const Moments& mom, std::size_t j)
{
    return {mom.mean[j], std::sqrt(mom.variance(j) / static_cast<double>(mom.count))};
}

SimSummary summarize(const Moments& mom, const Layout& layout, const SimConfig& cfg)
{
    const int n_periods = layout.n_periods;
    SimSummary out;
    out.n_paths = mom.count;
    out.seed = cfg.seed;
    out.total_profit = estimate(mom, Layout::total);
    if (cfg.deviation) out.deviation_profit = estimate(mom, Layout::deviation);
    if (cfg.offset) out.offset_profit_delta = estimate(mom, Layout::offset_delta);

    out.sq_error = Series<0, Estimate>(n_periods);
    for (int n = 0; n <= n_periods; ++n) out.sq_error[n] = estimate(mom, layout.sq_err(n));
    out.half_volume = Series<1, Estimate>(n_periods);
    for (int n = 1; n <= n_periods; ++n) out.half_volume[n] = estimate(mom, layout.half_volume(n));

    if (layout.covariances) {
        for (int n = 1; n <= n_periods; ++n) {
            for (int k = 1; k <= n; ++k) {
                const std::size_t j = layout.product(n, k);
                Estimate e = estimate(mom, j);
                e.mean -= mom.mean[layout.err(n)] * mom.mean[layout.flow(k)];
                out.covariances.push_back({n, k, e});
            }
        }
    }
    return out;
}

struct Prepared {
    StrategySchedule sched;
    Layout layout;
};

Prepared prepare(const EquilibriumPath& eq, const MarketParams& params, const SimConfig& cfg)
{
    validate(params);
    if (eq.n_periods() != params.n_periods) {
        throw Error(ErrorCode::InvalidArgument, "equilibrium path does not match params.n_periods");
    }
    if (cfg.model != eq.model) {
        throw Error(ErrorCode::InvalidArgument, "SimConfig.model differs from the equilibrium model");
    }
    validate(cfg, eq.n_periods());
    return {make_schedule(eq, params, cfg),
            Layout{eq.n_periods(), eq.n_periods() <= cfg.max_cov_periods}};
}

}  // namespace

SimSummary simulate_market(const EquilibriumPath& eq, const MarketParams& params,
                           const SimConfig& cfg)
{
    const Prepared prep = prepare(eq, params, cfg);
    const Layout& layout = prep.layout;
    const PathKernel kernel(prep.sched, params, cfg, layout);
    const std::size_t width = layout.size();
    const std::int64_t n_blocks = (cfg.n_paths + kBlockPaths - 1) / kBlockPaths;
    const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();

    Moments total(width);
    std::vector<Moments> batch;
    for (std::int64_t first = 0; first < n_blocks; first += kBlocksPerBatch) {
        const std::int64_t count = std::min(kBlocksPerBatch, n_blocks - first);
        batch.assign(static_cast<std::size_t>(count), Moments(width));

#pragma omp parallel num_threads(threads)
        {
            std::vector<double> obs(width, 0.0);
#pragma omp for schedule(dynamic)
            for (std::int64_t b = 0; b < count; ++b) {
                const std::int64_t begin = (first + b) * kBlockPaths;
                const std::int64_t end = std::min(begin + kBlockPaths, cfg.n_paths);
                Moments& mom = batch[static_cast<std::size_t>(b)];
                for (std::int64_t path = begin; path < end; ++path) {
                    kernel(path, obs.data());
                    mom.push(obs.data());
                }
            }
        }
        for (const Moments& mom : batch) total.merge(mom);
    }
    return summarize(total, layout, cfg);
}

SimSummary simulate_market_serial(const EquilibriumPath& eq, const MarketParams& params,
                                  const SimConfig& cfg)
{
    const Prepared prep = prepare(eq, params, cfg);
    const Layout& layout = prep.layout;
    const PathKernel kernel(prep.sched, params, cfg, layout);
    const std::size_t width = layout.size();

    std::vector<double> obs(width, 0.0);
    std::vector<double> sum(width, 0.0);
    std::vector<double> sum_sq(width, 0.0);
    for (std::int64_t path = 0; path < cfg.n_paths; ++path) {
        kernel(path, obs.data());
        for (std::size_t j = 0; j < width; ++j) {
            sum[j] += obs[j];
            sum_sq[j] += obs[j] * obs[j];
        }
    }

    const double n = static_cast<double>(cfg.n_paths);
    Moments mom(width);
    mom.count = cfg.n_paths;
    for (std::size_t j = 0; j < width; ++j) {
        mom.mean[j] = sum[j] / n;
        mom.m2[j] = std::max(0.0, sum_sq[j] - n * mom.mean[j] * mom.mean[j]);
    }
    return summarize(mom, layout, cfg);
}

DeviationCheck deviation_profit_mc(const EquilibriumPath& eq, const MarketParams& params,
                                   const SimConfig& cfg)
{
    if (!cfg.deviation) {
        throw Error(ErrorCode::InvalidArgument, "deviation_profit_mc needs a configured deviation");
    }
    const SimSummary summary = simulate_market(eq, params, cfg);
    const int m = cfg.deviation->period;
    const Continuation next = continuation_from_path(eq, params, m);
    const double sigma_prev = eq.sigma[m - 1];

    DeviationCheck out{};
    out.mc = *summary.deviation_profit;
    out.analytic = deviation_eval(eq.model, cfg.deviation->multiplier * eq.beta[m], next.a, next.b,
                                  sigma_prev, params);
    out.equilibrium_ex_ante = eq.alpha[m - 1] * sigma_prev + eq.delta[m - 1];
    return out;
}

}  // namespace insider
