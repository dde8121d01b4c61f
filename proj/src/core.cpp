#include "insider/core.hpp"

#include <cmath>

namespace insider {

std::string_view to_string(ModelKind model)
{
    switch (model) {
    case ModelKind::KyleBaseline: return "kyle";
    case ModelKind::RiskAverse: return "averse";
    case ModelKind::RiskNeutral: return "neutral";
    case ModelKind::RiskSeeking: return "seeking";
    }
    return "unknown";
}

ModelKind parse_model(std::string_view text)
{
    for (ModelKind m : kAllModels) {
        if (to_string(m) == text) return m;
    }
    throw Error(ErrorCode::InvalidArgument,
                "unknown model '" + std::string(text) +
                    "' (expected kyle, averse, neutral or seeking)");
}

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::NonPositiveNoise: return "NonPositiveNoise";
    case ErrorCode::ZeroPeriods: return "ZeroPeriods";
    case ErrorCode::NonPositiveC: return "NonPositiveC";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::AdmissibilityViolation: return "AdmissibilityViolation";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InconsistentPath: return "InconsistentPath";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& what, std::optional<int> period)
{
    std::string msg(to_string(code));
    if (period) msg += " at period " + std::to_string(*period);
    msg += ": " + what;
    return msg;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& what, std::optional<int> period)
    : std::runtime_error(decorate(code, what, period)), code_(code), period_(period)
{
}

double MarketParams::noise_scale() const noexcept
{
    return sigma_u * std::sqrt(dt());
}

MarketParams validate(const MarketParams& params)
{
    // Negated comparisons so NaN is rejected too.
    if (!(params.sigma0_sq > 0.0)) {
        throw Error(ErrorCode::NonPositiveVariance, "sigma0_sq must be > 0");
    }
    if (!(params.sigma_u > 0.0)) {
        throw Error(ErrorCode::NonPositiveNoise, "sigma_u must be > 0");
    }
    if (params.n_periods < 1) {
        throw Error(ErrorCode::ZeroPeriods, "n_periods must be >= 1");
    }
    if (!std::isfinite(params.p0)) {
        throw Error(ErrorCode::InvalidArgument, "p0 must be finite");
    }
    return params;
}

}  // namespace insider
