#pragma once

// Economic equilibrium quantities built from the dimensionless coefficients,
// their continuous-trading limits, and the single-period deviation objectives
// used to check optimality.

#include "insider/core.hpp"

#include <optional>
#include <span>
#include <vector>

namespace insider {

/// beta_n, lambda_n, Sigma_n, alpha_n, delta_n from (a, b, c).
/// Sigma is accumulated in log space; values below the smallest normal
/// double are clamped and flagged in EquilibriumPath::sigma_underflow.
/// Throws InconsistentPath if Sigma_n != (1 - lambda_n beta_n) Sigma_{n-1}
/// beyond 1e-12 relative.
EquilibriumPath build_path(const CoefficientPath& coeffs, const MarketParams& params);

/// Continuous-trading limits on a grid of calendar times t in (0, 1).
/// beta_rate_lim is the limit of beta_[Nt] / dt. Divergent quantities are +inf.
struct LimitCurves {
    ModelKind model = ModelKind::KyleBaseline;
    std::vector<double> t_grid;
    std::vector<double> sigma_lim;
    std::vector<double> lambda_lim;
    std::vector<double> beta_rate_lim;
    std::vector<double> c_scaled;  // c_[Nt] / dt^{1/4} (averse) or / dt^{1/2}
    std::vector<double> b_scaled;  // b_[Nt] * dt^{1/4} (averse) or * dt^{1/2}
    std::vector<double> a_scaled;
};

/// Exponent p of the coefficient scaling: c ~ dt^p, a, b ~ dt^{-p}.
double coefficient_scaling_power(ModelKind model);

/// The kyle baseline shares the risk-neutral limits. Throws DomainError for t outside (0, 1).
LimitCurves limit_curves(ModelKind model, const MarketParams& params, std::span<const double> t_grid);

/// Discrete index [Nt] = floor(N t).
int discrete_index(int n_periods, double t);

/// Averse-model residual-variance envelope
///   Sigma_0 exp(-ln(1 + c_{N-1}^2) / dt) < Sigma_[Nt] < Sigma_0 exp(-ln(1 + c_1^2) / dt),
/// evaluated in log space. Requires N >= 2.
struct SigmaBounds {
    double lower;
    double upper;
};
SigmaBounds sigma_bounds_model1(const MarketParams& params, double c1, double c_last);

/// Per-period envelope with the exponent n instead of 1/dt:
///   Sigma_0 (1 + c_{N-1}^2)^{-n} <= Sigma_n <= Sigma_0 (1 + c_1^2)^{-n},
/// which follows from the monotonicity of c alone.
struct SigmaEnvelope {
    Series<0> lower;
    Series<0> upper;
};
SigmaEnvelope sigma_envelope_per_period(const CoefficientPath& coeffs, const MarketParams& params);

/// Equilibrium values the price-taking (kyle) insider treats as fixed when
/// evaluating a deviation: this period's lambda and next period's alpha, delta.
struct PriceTakingContext {
    double lambda;
    double alpha_next;
    double delta_next;
};

struct DeviationEval {
    double alpha_prev;  // alpha_{n-1}(beta)
    double delta_prev;  // delta_{n-1}(beta)
    double ex_ante;     // alpha_prev * Sigma_{n-1} + delta_prev
    /// Ex-ante profit with lambda and the continuation held at equilibrium.
    std::optional<double> price_taking;
};

/// Value of the period-n problem when the insider trades with intensity beta
/// and the price impact responds to beta. a_n, b_n are the continuation
/// coefficients (both 0 for the last period).
DeviationEval deviation_eval(ModelKind model, double beta, double a_n, double b_n,
                             double sigma_prev, const MarketParams& params,
                             const std::optional<PriceTakingContext>& price_taking = std::nullopt);

/// Sign of (objective(lhs) - objective(rhs)) under the model's maximization rule:
/// averse compares delta then alpha, seeking alpha then delta, neutral ex_ante,
/// kyle the price-taking value (which must be present).
int compare_objective(ModelKind model, const DeviationEval& lhs, const DeviationEval& rhs);

/// Everything needed to evaluate a deviation in period n of a solved economy.
struct PeriodContext {
    int period;
    double a_next;  // a_n (0 at n = N)
    double b_next;  // b_n (0 at n = N)
    double sigma_prev;
    double beta;
    PriceTakingContext price_taking;
};
PeriodContext period_context(const CoefficientPath& coeffs, const EquilibriumPath& path, int n);

/// Continuation coefficients recovered from an EquilibriumPath:
/// a_n = delta_n / (s Sigma_n^{1/2}), b_n = alpha_n Sigma_n^{1/2} / s, zero at n = N.
struct Continuation {
    double a;
    double b;
};
Continuation continuation_from_path(const EquilibriumPath& path, const MarketParams& params, int n);

/// d lambda_1 / d beta_1 = Sigma_0 (sigma_u^2 dt - beta^2 Sigma_0) / (beta^2 Sigma_0 + sigma_u^2 dt)^2
double lambda_sensitivity(double beta1, const MarketParams& params);

/// Price impact that makes prices efficient for a given intensity:
/// lambda = beta S / (beta^2 S + sigma_u^2 dt).
double efficient_lambda(double beta, double sigma_prev, const MarketParams& params);

}  // namespace insider
