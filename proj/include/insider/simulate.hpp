#pragma once

// Monte Carlo simulation of the sequential auction under a solved equilibrium.
//
// Two implementations share one per-path kernel:
//   simulate_market         OpenMP over fixed-size path blocks; block results
//                           are merged in block order, so the summary is
//                           bitwise identical for any thread count.
//   simulate_market_serial  single loop over paths with running sums; kept as
//                           the reference the parallel version is tested against.

#include "insider/core.hpp"
#include "insider/path.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace insider {

/// One-period deviation: in `period` the insider trades multiplier * beta_period.
/// The market maker recomputes that period's lambda for the deviated intensity,
/// and later periods follow the equilibrium coefficients rescaled to the
/// post-deviation residual variance.
struct Deviation {
    int period = 1;
    double multiplier = 1.0;
};

/// Predictable order component: x_n += lag * y_{n-1} + constant (y_0 = 0).
/// The market maker prices only the surprise y_n - (lag * y_{n-1} + constant).
struct Offset {
    double lag = 0.0;
    double constant = 0.0;
};

struct SimConfig {
    std::int64_t n_paths = 100'000;
    std::uint64_t seed = 1;
    ModelKind model = ModelKind::KyleBaseline;
    std::optional<Deviation> deviation;
    std::optional<Offset> offset;
    int threads = 0;  // 0: OpenMP default
    /// Covariances cov(v - p_n, y_k) cost O(N^2) per path; skipped above this N.
    int max_cov_periods = 64;
};

void validate(const SimConfig& cfg, int n_periods);

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample std / sqrt(n_paths)

    friend bool operator==(const Estimate&, const Estimate&) = default;
};

struct CovarianceEstimate {
    int period;      // n in v - p_n
    int flow_index;  // k in y_k, k <= n
    Estimate value;

    friend bool operator==(const CovarianceEstimate&, const CovarianceEstimate&) = default;
};

struct SimSummary {
    Estimate total_profit;
    /// Profits from the deviation period onward, when a deviation is configured.
    std::optional<Estimate> deviation_profit;
    /// Paired per-path difference (with offset) - (without offset) of total profit.
    std::optional<Estimate> offset_profit_delta;
    Series<0, Estimate> sq_error;      // E[(v - p_n)^2], n = 0..N
    Series<1, Estimate> half_volume;   // E[|x_n| / 2], n = 1..N
    std::vector<CovarianceEstimate> covariances;  // empty when N > max_cov_periods
    std::int64_t n_paths = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const SimSummary&, const SimSummary&) = default;
};

/// Intensities and price impacts actually used by the simulation, with the
/// residual variance they imply.
struct StrategySchedule {
    Series<1> beta;
    Series<1> lambda;
    Series<0> sigma;
};
StrategySchedule make_schedule(const EquilibriumPath& eq, const MarketParams& params,
                               const SimConfig& cfg);

SimSummary simulate_market(const EquilibriumPath& eq, const MarketParams& params,
                           const SimConfig& cfg);

SimSummary simulate_market_serial(const EquilibriumPath& eq, const MarketParams& params,
                                  const SimConfig& cfg);

struct DeviationCheck {
    Estimate mc;                     // E[sum of profits from the deviation period on]
    DeviationEval analytic;          // closed-form value of the same quantity (ex_ante)
    double equilibrium_ex_ante;      // alpha_{m-1} Sigma_{m-1} + delta_{m-1}
};

DeviationCheck deviation_profit_mc(const EquilibriumPath& eq, const MarketParams& params,
                                   const SimConfig& cfg);

}  // namespace insider
