#pragma once

// Shared domain types for the sequential-auction insider trading models.
//
// Index convention (used by every module):
//   a_n, b_n, alpha_n, delta_n   n = 0 .. N-1
//   c_n, beta_n, lambda_n        n = 1 .. N
//   Sigma_n                      n = 0 .. N
// Series<First> stores a dense sequence whose first valid index is First,
// so code can be written with the same subscripts as the model equations.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace insider {

enum class ModelKind {
    KyleBaseline,  // price-taking insider, the classical benchmark
    RiskAverse,    // maximizes guaranteed profit first, then risky profit
    RiskNeutral,   // maximizes ex-ante expected profit
    RiskSeeking,   // maximizes risky profit first, then guaranteed profit
};

inline constexpr std::array<ModelKind, 4> kAllModels = {
    ModelKind::KyleBaseline, ModelKind::RiskAverse, ModelKind::RiskNeutral,
    ModelKind::RiskSeeking};

/// "kyle" | "averse" | "neutral" | "seeking"
std::string_view to_string(ModelKind model);
ModelKind parse_model(std::string_view text);

enum class ErrorCode {
    NonPositiveVariance,
    NonPositiveNoise,
    ZeroPeriods,
    NonPositiveC,
    BracketFailure,
    AdmissibilityViolation,
    DomainError,
    InconsistentPath,
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what,
          std::optional<int> period = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    /// Period index the failure is attached to, when it came from a recursion step.
    std::optional<int> period() const noexcept { return period_; }

private:
    ErrorCode code_;
    std::optional<int> period_;
};

/// Exogenous primitives of one economy. Units: sigma0_sq in price^2,
/// sigma_u in shares per sqrt(time), p0 in price.
struct MarketParams {
    double sigma0_sq = 1.0;
    double sigma_u = 0.5;
    int n_periods = 1;
    double p0 = 0.0;

    /// Auction spacing 1/N; the only place it is computed.
    double dt() const noexcept { return 1.0 / static_cast<double>(n_periods); }
    /// Noise scale sigma_u * dt^{1/2}, the per-auction noise standard deviation.
    double noise_scale() const noexcept;
};

/// Returns params unchanged when valid; otherwise throws Error naming the field.
MarketParams validate(const MarketParams& params);

template <int First, class T = double>
class Series {
public:
    Series() = default;
    explicit Series(int last, T fill = T{})
        : values_(static_cast<std::size_t>(last - First + 1), fill) {}

    static constexpr int first() noexcept { return First; }
    int last() const noexcept { return First + static_cast<int>(values_.size()) - 1; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    T& operator[](int n) { return values_[static_cast<std::size_t>(n - First)]; }
    const T& operator[](int n) const { return values_[static_cast<std::size_t>(n - First)]; }
    const T& at(int n) const { return values_.at(static_cast<std::size_t>(n - First)); }

    const std::vector<T>& values() const noexcept { return values_; }
    std::vector<T>& values() noexcept { return values_; }

    friend bool operator==(const Series&, const Series&) = default;

private:
    std::vector<T> values_;
};

/// Dimensionless backward-recursion coefficients.
/// a, b: n = 0..N-1; c: n = 1..N. Terminal layer a_{N-1}=0, b_{N-1}=1/2, c_N=1.
struct CoefficientPath {
    ModelKind model = ModelKind::KyleBaseline;
    Series<0> a;
    Series<0> b;
    Series<1> c;

    int n_periods() const noexcept { return c.last(); }
};

/// Economic equilibrium quantities.
struct EquilibriumPath {
    ModelKind model = ModelKind::KyleBaseline;
    Series<1> beta;       // shares per price
    Series<1> lambda;     // price per share
    Series<0> sigma;      // price^2, n = 0..N
    Series<0> log_sigma;  // natural log of sigma, never clamped
    Series<0> alpha;      // shares per price, n = 0..N-1
    Series<0> delta;      // price * shares, n = 0..N-1
    double dt = 1.0;
    /// Set when some Sigma_n fell below the smallest normal double and was clamped.
    bool sigma_underflow = false;

    int n_periods() const noexcept { return beta.last(); }
};

}  // namespace insider
