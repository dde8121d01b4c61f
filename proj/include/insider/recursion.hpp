#pragma once

// Backward coefficient recursions for the four equilibrium concepts.
//
// Every model shares the same (a, b) update; they differ only in how the
// trading-intensity coefficient c_n is selected from (a_n, b_n):
//
//   averse   c = sqrt((2b - a) / (a + b))
//   neutral  (1 - c^2) / (c sqrt(1 + c^2))  = a + b
//   seeking  sqrt(1 + c^2) (1 - c^2) / c     = 3b
//   kyle     sqrt(1 + c^2) (1 - c^2) / c     = 2b
//
// The implicit left-hand sides are strictly decreasing on (0, 1] and vanish
// at c = 1, so each has a unique root there for a non-negative right side.

#include "insider/core.hpp"

#include <cmath>

namespace insider {

struct RootBracket {
    double lo = 1e-12;
    double hi = 1.0;
    double tol = 1e-14;
    int max_iter = 200;
};

/// Bisection for a decreasing residual: requires f(lo) > 0 and f(hi) <= 0.
/// Stops once hi - lo < tol or after max_iter halvings; returns the midpoint.
template <class F>
double bisect_decreasing(F&& f, const RootBracket& bracket)
{
    double lo = bracket.lo;
    double hi = bracket.hi;
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    if (!(f_lo > 0.0) || !(f_hi <= 0.0)) {
        throw Error(ErrorCode::BracketFailure,
                    "residual does not change sign on [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "] (f(lo)=" + std::to_string(f_lo) +
                        ", f(hi)=" + std::to_string(f_hi) + ")");
    }
    for (int i = 0; i < bracket.max_iter && hi - lo >= bracket.tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct Backstep {
    double a_prev;
    double b_prev;
};

/// (a_n, b_n, c_n) -> (a_{n-1}, b_{n-1}); identical for all models.
Backstep generic_backstep(double a_n, double b_n, double c_n);

/// Trading-intensity coefficient c_n chosen by the model's optimality condition.
double select_c(ModelKind model, double a_n, double b_n);

/// Full backward solve from the terminal layer. For N = 1 all models coincide.
CoefficientPath solve(ModelKind model, const MarketParams& params);

/// Independent c-only recursions. averse couples three consecutive c's
/// (needs N >= 3); neutral, seeking and kyle step one c at a time (N >= 2).
/// a and b are reconstructed from the c's without going through select_c.
CoefficientPath crosscheck_recursion(ModelKind model, const MarketParams& params);

namespace detail {

/// sqrt(1 + c^2) (1 - c^2) / c
inline double seeking_lhs(double c)
{
    return std::sqrt(1.0 + c * c) * (1.0 - c * c) / c;
}

/// (1 - c^2) / (c sqrt(1 + c^2))
inline double neutral_lhs(double c)
{
    return (1.0 - c * c) / (c * std::sqrt(1.0 + c * c));
}

}  // namespace detail

}  // namespace insider
