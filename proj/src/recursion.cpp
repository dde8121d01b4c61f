#include "insider/recursion.hpp"

#include <cmath>
#include <string>

namespace insider {

namespace {

constexpr RootBracket kDefaultBracket{};

void check_positive_c(double c_n)
{
    if (!(c_n > 0.0)) {
        throw Error(ErrorCode::NonPositiveC, "c_n = " + std::to_string(c_n) + " must be > 0");
    }
}

// 1 / (1 + c^2)^{3/2}
double inv_three_halves(double c)
{
    const double k = 1.0 / (c * c + 1.0);
    return k * std::sqrt(k);
}

}  // namespace

Backstep generic_backstep(double a_n, double b_n, double c_n)
{
    check_positive_c(c_n);
    const double k = 1.0 / (c_n * c_n + 1.0);
    const double k_half = std::sqrt(k);
    const double k_three_halves = k * k_half;
    return {a_n * k_half + b_n * k_three_halves * c_n * c_n,
            b_n * k_three_halves + c_n * k};
}

double select_c(ModelKind model, double a_n, double b_n)
{
    switch (model) {
    case ModelKind::RiskAverse: {
        if (!(2.0 * b_n - a_n > 0.0) || !(a_n + b_n > 0.0) || a_n < 0.0 || b_n < 0.0) {
            throw Error(ErrorCode::AdmissibilityViolation,
                        "averse step needs a, b >= 0, 2b - a > 0 and a + b > 0 (a=" + std::to_string(a_n) +
                            ", b=" + std::to_string(b_n) + ")");
        }
        return std::sqrt((2.0 * b_n - a_n) / (a_n + b_n));
    }
    case ModelKind::RiskNeutral: {
        const double target = a_n + b_n;
        if (!(target > 0.0) || !(b_n > 0.0)) {
            throw Error(ErrorCode::AdmissibilityViolation,
                        "neutral step needs a + b > 0 and b > 0");
        }
        return bisect_decreasing([target](double c) { return detail::neutral_lhs(c) - target; },
                                 kDefaultBracket);
    }
    case ModelKind::RiskSeeking:
    case ModelKind::KyleBaseline: {
        if (!(b_n > 0.0)) {
            throw Error(ErrorCode::AdmissibilityViolation, "step needs b > 0");
        }
        const double target = (model == ModelKind::RiskSeeking ? 3.0 : 2.0) * b_n;
        return bisect_decreasing([target](double c) { return detail::seeking_lhs(c) - target; },
                                 kDefaultBracket);
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown model");
}

CoefficientPath solve(ModelKind model, const MarketParams& params)
{
    const int n_periods = validate(params).n_periods;
    CoefficientPath path;
    path.model = model;
    path.a = Series<0>(n_periods - 1);
    path.b = Series<0>(n_periods - 1);
    path.c = Series<1>(n_periods);

    path.c[n_periods] = 1.0;
    path.a[n_periods - 1] = 0.0;
    path.b[n_periods - 1] = 0.5;

    // The kyle insider's value update b_{n-1} = 1/(2 c_n) coincides with the
    // generic backstep once c_n satisfies the kyle condition, so every model
    // shares the same update here.
    for (int n = n_periods - 1; n >= 1; --n) {
        try {
            const double c_n = select_c(model, path.a[n], path.b[n]);
            const Backstep prev = generic_backstep(path.a[n], path.b[n], c_n);
            path.c[n] = c_n;
            path.a[n - 1] = prev.a_prev;
            path.b[n - 1] = prev.b_prev;
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), n);
        }
    }
    return path;
}

namespace {

// averse: given c_n and c_{n-1}, the c_{n-2} solving
//   (c_n^2 + 1)(2 - x^2) c_{n-1}^3 = 2 (1 + c_{n-1}^2)^{1/2} c_n x^2
// The equation is linear in x^2, so the positive root is explicit.
double averse_c_two_back(double c_n, double c_prev)
{
    const double k = (c_n * c_n + 1.0) * c_prev * c_prev * c_prev;
    const double m = 2.0 * std::sqrt(1.0 + c_prev * c_prev) * c_n;
    return std::sqrt(2.0 * k / (k + m));
}

CoefficientPath crosscheck_averse(int n_periods)
{
    // c is extended down to index -1 so that b_0 has the c_{-1} it needs.
    Series<-1> c(n_periods);
    c[n_periods] = 1.0;
    c[n_periods - 1] = std::sqrt(2.0);
    for (int k = n_periods - 2; k >= -1; --k) {
        c[k] = averse_c_two_back(c[k + 2], c[k + 1]);
    }

    CoefficientPath out;
    out.model = ModelKind::RiskAverse;
    out.a = Series<0>(n_periods - 1);
    out.b = Series<0>(n_periods - 1);
    out.c = Series<1>(n_periods);
    for (int n = 1; n <= n_periods; ++n) out.c[n] = c[n];
    for (int n = 0; n < n_periods - 1; ++n) {
        const double cn2 = c[n] * c[n];
        const double cp2 = c[n - 1] * c[n - 1];
        out.b[n] = c[n] * std::sqrt(cn2 + 1.0) * (2.0 - cp2) / (3.0 * cp2);
        out.a[n] = (2.0 - cn2) / (cn2 + 1.0) * out.b[n];
    }
    out.a[n_periods - 1] = 0.0;
    out.b[n_periods - 1] = 0.5;
    return out;
}

// Single-step c recursions: c_{n-1} is the root in (0, 1] of lhs(x) = rhs(c_n).
template <class Lhs, class Rhs>
Series<0> step_down(int n_periods, Lhs lhs, Rhs rhs)
{
    Series<0> c(n_periods);
    c[n_periods] = 1.0;
    for (int k = n_periods - 1; k >= 0; --k) {
        const double target = rhs(c[k + 1]);
        try {
            c[k] = bisect_decreasing([&](double x) { return lhs(x) - target; }, kDefaultBracket);
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), k);
        }
    }
    return c;
}

// a_{n-1} = a_n / sqrt(1 + c_n^2) + b_n c_n^2 / (1 + c_n^2)^{3/2}, from a_{N-1} = 0.
void rebuild_a(CoefficientPath& out)
{
    const int n_periods = out.n_periods();
    out.a[n_periods - 1] = 0.0;
    for (int n = n_periods - 1; n >= 1; --n) {
        const double c = out.c[n];
        out.a[n - 1] =
            out.a[n] / std::sqrt(1.0 + c * c) + out.b[n] * c * c * inv_three_halves(c);
    }
}

CoefficientPath crosscheck_single_step(ModelKind model, int n_periods)
{
    Series<0> c;
    switch (model) {
    case ModelKind::RiskNeutral:
        c = step_down(n_periods, detail::neutral_lhs,
                      [](double cn) { return 1.0 / (cn * (1.0 + cn * cn)); });
        break;
    case ModelKind::RiskSeeking:
        c = step_down(n_periods, detail::seeking_lhs,
                      [](double cn) { return (1.0 / cn + 2.0 * cn) / (cn * cn + 1.0); });
        break;
    case ModelKind::KyleBaseline:
        c = step_down(n_periods, detail::seeking_lhs, [](double cn) { return 1.0 / cn; });
        break;
    case ModelKind::RiskAverse:
        break;
    }

    CoefficientPath out;
    out.model = model;
    out.a = Series<0>(n_periods - 1);
    out.b = Series<0>(n_periods - 1);
    out.c = Series<1>(n_periods);
    for (int n = 1; n <= n_periods; ++n) out.c[n] = c[n];

    if (model == ModelKind::RiskNeutral) {
        // b from its own backward update, a as the remainder of the known a + b.
        out.b[n_periods - 1] = 0.5;
        for (int n = n_periods - 1; n >= 1; --n) {
            const double cn = out.c[n];
            out.b[n - 1] = out.b[n] * inv_three_halves(cn) + cn / (cn * cn + 1.0);
        }
        for (int n = 0; n < n_periods - 1; ++n) {
            out.a[n] = detail::neutral_lhs(c[n]) - out.b[n];
        }
        out.a[n_periods - 1] = 0.0;
        return out;
    }

    // seeking: 3 b_n = lhs(c_n); kyle: 2 b_n = lhs(c_n).
    const double scale = model == ModelKind::RiskSeeking ? 3.0 : 2.0;
    for (int n = 0; n < n_periods - 1; ++n) out.b[n] = detail::seeking_lhs(c[n]) / scale;
    out.b[n_periods - 1] = 0.5;
    rebuild_a(out);
    return out;
}

}  // namespace

CoefficientPath crosscheck_recursion(ModelKind model, const MarketParams& params)
{
    const int n_periods = validate(params).n_periods;
    if (model == ModelKind::RiskAverse) {
        if (n_periods < 3) {
            throw Error(ErrorCode::DomainError, "averse cross-check needs N >= 3");
        }
        return crosscheck_averse(n_periods);
    }
    if (n_periods < 2) {
        throw Error(ErrorCode::DomainError, "cross-check needs N >= 2");
    }
    return crosscheck_single_step(model, n_periods);
}

}  // namespace insider
