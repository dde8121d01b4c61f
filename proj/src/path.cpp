#include "insider/path.hpp"

#include <cfloat>
#include <cmath>
#include <limits>
#include <string>

namespace insider {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPathRelTol = 1e-12;

}  // namespace

EquilibriumPath build_path(const CoefficientPath& coeffs, const MarketParams& params)
{
    validate(params);
    const int n_periods = coeffs.n_periods();
    if (n_periods != params.n_periods || coeffs.a.last() != n_periods - 1 ||
        coeffs.b.last() != n_periods - 1) {
        throw Error(ErrorCode::InvalidArgument, "coefficient path does not match params.n_periods");
    }

    const double s = params.noise_scale();
    const double log_floor = std::log(DBL_MIN);

    EquilibriumPath path;
    path.model = coeffs.model;
    path.dt = params.dt();
    path.beta = Series<1>(n_periods);
    path.lambda = Series<1>(n_periods);
    path.sigma = Series<0>(n_periods);
    path.log_sigma = Series<0>(n_periods);
    path.alpha = Series<0>(n_periods - 1);
    path.delta = Series<0>(n_periods - 1);

    path.log_sigma[0] = std::log(params.sigma0_sq);
    for (int n = 1; n <= n_periods; ++n) {
        const double c = coeffs.c[n];
        path.log_sigma[n] = path.log_sigma[n - 1] - std::log1p(c * c);
    }
    for (int n = 0; n <= n_periods; ++n) {
        if (path.log_sigma[n] < log_floor) {
            path.sigma[n] = DBL_MIN;
            path.sigma_underflow = true;
        } else {
            path.sigma[n] = std::exp(path.log_sigma[n]);
        }
    }
    path.sigma[0] = params.sigma0_sq;

    for (int n = 1; n <= n_periods; ++n) {
        const double c = coeffs.c[n];
        const double half_log_prev = 0.5 * path.log_sigma[n - 1];
        path.beta[n] = c * s * std::exp(-half_log_prev);
        path.lambda[n] = c * std::exp(half_log_prev) / ((1.0 + c * c) * s);
    }
    for (int n = 0; n < n_periods; ++n) {
        const double half_log = 0.5 * path.log_sigma[n];
        path.alpha[n] = coeffs.b[n] * s * std::exp(-half_log);
        path.delta[n] = coeffs.a[n] * s * std::exp(half_log);
    }

    if (!path.sigma_underflow) {
        for (int n = 1; n <= n_periods; ++n) {
            const double implied = (1.0 - path.lambda[n] * path.beta[n]) * path.sigma[n - 1];
            if (std::abs(implied - path.sigma[n]) > kPathRelTol * path.sigma[n]) {
                throw Error(ErrorCode::InconsistentPath,
                            "Sigma_n differs from (1 - lambda beta) Sigma_{n-1}", n);
            }
        }
    }
    return path;
}

double coefficient_scaling_power(ModelKind model)
{
    return model == ModelKind::RiskAverse ? 0.25 : 0.5;
}

int discrete_index(int n_periods, double t)
{
    return static_cast<int>(std::floor(static_cast<double>(n_periods) * t));
}

LimitCurves limit_curves(ModelKind model, const MarketParams& params, std::span<const double> t_grid)
{
    validate(params);
    for (double t : t_grid) {
        if (!(t > 0.0 && t < 1.0)) {
            throw Error(ErrorCode::DomainError, "limit curves need t in (0, 1), got " + std::to_string(t));
        }
    }

    const std::size_t m = t_grid.size();
    LimitCurves out;
    out.model = model;
    out.t_grid.assign(t_grid.begin(), t_grid.end());
    out.sigma_lim.resize(m);
    out.lambda_lim.resize(m);
    out.beta_rate_lim.resize(m);
    out.c_scaled.resize(m);
    out.b_scaled.resize(m);
    out.a_scaled.resize(m);

    const double sigma0 = params.sigma0_sq;
    const double root_sigma0 = std::sqrt(sigma0);
    const double su = params.sigma_u;
    const double sqrt3 = std::sqrt(3.0);
    const double two_thirds_34 = std::pow(2.0 / 3.0, 0.75);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
        const double t = out.t_grid[i];
        const double rem = 1.0 - t;
        switch (model) {
        case ModelKind::RiskAverse:
            out.c_scaled[i] = std::pow(2.0 / (3.0 * rem), 0.25);
            out.b_scaled[i] = two_thirds_34 * std::pow(rem, 0.25);
            out.a_scaled[i] = 2.0 * two_thirds_34 * std::pow(rem, 0.25);
            out.sigma_lim[i] = 0.0;
            out.lambda_lim[i] = 0.0;
            out.beta_rate_lim[i] = kInf;
            break;
        case ModelKind::RiskNeutral:
        case ModelKind::KyleBaseline:
            out.c_scaled[i] = 1.0 / std::sqrt(rem);
            out.b_scaled[i] = 0.5 * std::sqrt(rem);
            out.a_scaled[i] = 0.5 * std::sqrt(rem);
            out.sigma_lim[i] = rem * sigma0;
            out.lambda_lim[i] = root_sigma0 / su;
            out.beta_rate_lim[i] = su / (rem * root_sigma0);
            break;
        case ModelKind::RiskSeeking:
            out.c_scaled[i] = sqrt3 / 3.0 / std::sqrt(rem);
            out.b_scaled[i] = sqrt3 / 3.0 * std::sqrt(rem);
            out.a_scaled[i] = sqrt3 / 6.0 * std::sqrt(rem);
            out.sigma_lim[i] = std::cbrt(rem) * sigma0;
            out.lambda_lim[i] = sqrt3 * root_sigma0 / (3.0 * std::cbrt(rem) * su);
            out.beta_rate_lim[i] = sqrt3 * su / (3.0 * std::pow(rem, 2.0 / 3.0) * root_sigma0);
            break;
        }
    }
    return out;
}

SigmaBounds sigma_bounds_model1(const MarketParams& params, double c1, double c_last)
{
    validate(params);
    if (params.n_periods < 2) {
        throw Error(ErrorCode::DomainError, "variance bounds need N >= 2");
    }
    const double inv_dt = static_cast<double>(params.n_periods);
    const double log_sigma0 = std::log(params.sigma0_sq);
    return {std::exp(log_sigma0 - std::log1p(c_last * c_last) * inv_dt),
            std::exp(log_sigma0 - std::log1p(c1 * c1) * inv_dt)};
}

SigmaEnvelope sigma_envelope_per_period(const CoefficientPath& coeffs, const MarketParams& params)
{
    validate(params);
    const int n_periods = coeffs.n_periods();
    if (n_periods < 2) {
        throw Error(ErrorCode::DomainError, "variance envelope needs N >= 2");
    }
    const double log_sigma0 = std::log(params.sigma0_sq);
    const double fast = std::log1p(coeffs.c[n_periods - 1] * coeffs.c[n_periods - 1]);
    const double slow = std::log1p(coeffs.c[1] * coeffs.c[1]);
    SigmaEnvelope env{Series<0>(n_periods), Series<0>(n_periods)};
    for (int n = 0; n <= n_periods; ++n) {
        env.lower[n] = std::exp(log_sigma0 - fast * n);
        env.upper[n] = std::exp(log_sigma0 - slow * n);
    }
    return env;
}

double efficient_lambda(double beta, double sigma_prev, const MarketParams& params)
{
    const double q = params.sigma_u * params.sigma_u * params.dt();
    return beta * sigma_prev / (beta * beta * sigma_prev + q);
}

DeviationEval deviation_eval([[maybe_unused]] ModelKind model, double beta, double a_n, double b_n,
                             double sigma_prev, const MarketParams& params,
                             const std::optional<PriceTakingContext>& price_taking)
{
    if (!(sigma_prev > 0.0)) {
        throw Error(ErrorCode::DomainError, "sigma_prev must be > 0");
    }
    const double s = params.noise_scale();
    const double q = s * s;
    const double denom = beta * beta * sigma_prev + q;
    const double keep = q / denom;                  // Sigma_n / Sigma_{n-1}
    const double ratio = sigma_prev / denom;

    DeviationEval out{};
    out.alpha_prev = b_n * s / std::sqrt(sigma_prev) * keep * std::sqrt(keep) + beta * keep;
    out.delta_prev = a_n * q * std::sqrt(ratio) + b_n * beta * beta * q * ratio * std::sqrt(ratio);
    out.ex_ante = out.alpha_prev * sigma_prev + out.delta_prev;

    if (price_taking) {
        const double lam = price_taking->lambda;
        const double alpha_next = price_taking->alpha_next;
        const double stay = 1.0 - lam * beta;
        out.price_taking = (beta * stay + alpha_next * stay * stay) * sigma_prev +
                           alpha_next * lam * lam * q + price_taking->delta_next;
    }
    return out;
}

namespace {

int sign_of(double x, double y)
{
    return (x > y) - (x < y);
}

}  // namespace

int compare_objective(ModelKind model, const DeviationEval& lhs, const DeviationEval& rhs)
{
    switch (model) {
    case ModelKind::RiskAverse: {
        const int primary = sign_of(lhs.delta_prev, rhs.delta_prev);
        return primary != 0 ? primary : sign_of(lhs.alpha_prev, rhs.alpha_prev);
    }
    case ModelKind::RiskSeeking: {
        const int primary = sign_of(lhs.alpha_prev, rhs.alpha_prev);
        return primary != 0 ? primary : sign_of(lhs.delta_prev, rhs.delta_prev);
    }
    case ModelKind::RiskNeutral:
        return sign_of(lhs.ex_ante, rhs.ex_ante);
    case ModelKind::KyleBaseline:
        if (!lhs.price_taking || !rhs.price_taking) {
            throw Error(ErrorCode::InvalidArgument,
                        "kyle objective needs the price-taking context");
        }
        return sign_of(*lhs.price_taking, *rhs.price_taking);
    }
    return 0;
}

PeriodContext period_context(const CoefficientPath& coeffs, const EquilibriumPath& path, int n)
{
    const int n_periods = path.n_periods();
    if (n < 1 || n > n_periods) {
        throw Error(ErrorCode::DomainError, "period " + std::to_string(n) + " out of range");
    }
    PeriodContext ctx{};
    ctx.period = n;
    const bool last = n == n_periods;
    ctx.a_next = last ? 0.0 : coeffs.a[n];
    ctx.b_next = last ? 0.0 : coeffs.b[n];
    ctx.sigma_prev = path.sigma[n - 1];
    ctx.beta = path.beta[n];
    ctx.price_taking = {path.lambda[n], last ? 0.0 : path.alpha[n], last ? 0.0 : path.delta[n]};
    return ctx;
}

Continuation continuation_from_path(const EquilibriumPath& path, const MarketParams& params, int n)
{
    if (n >= path.n_periods()) return {0.0, 0.0};
    const double s = params.noise_scale();
    const double root = std::exp(0.5 * path.log_sigma[n]);
    return {path.delta[n] / (s * root), path.alpha[n] * root / s};
}

double lambda_sensitivity(double beta1, const MarketParams& params)
{
    validate(params);
    const double q = params.sigma_u * params.sigma_u * params.dt();
    const double sigma0 = params.sigma0_sq;
    const double denom = beta1 * beta1 * sigma0 + q;
    return sigma0 * (q - beta1 * beta1 * sigma0) / (denom * denom);
}

}  // namespace insider
