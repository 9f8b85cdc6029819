#pragma once

#include <cstddef>

namespace dcvar::oracle {

/// ln Z ~ Normal(m0, nu0^2). Kept separate from the closed-form classes so the
/// checks below never route through them.
struct LognormalParams {
    double m0 = 0.0;
    double nu0 = 1.0;
};

/// E[Z^p 1{Z <= y}] by adaptive Gauss–Kronrod quadrature in log space.
double quad_H(const LognormalParams& params, int p, double y);

struct StaticOptimum {
    double a = 0.0;  ///< Z-threshold below which M = B
    double b = 0.0;  ///< Z-threshold below which M >= -alpha
    double expected = 0.0;
    double budget = 0.0;
    double constraint = 0.0;
};

/// Brute-force search over payoffs M = B 1{Z <= a} - alpha 1{a < Z <= b} with
/// (a, b) on a log-spaced grid of grid_n nodes spanning m0 +- 8 nu0, plus a = 0
/// and b = +inf. Budget relaxed to E[Z M] <= w0 (1 + 1e-4).
/// Throws NoFeasibleGridPoint when no pair satisfies both constraints.
StaticOptimum grid_search_static(const LognormalParams& params, double w0, double alpha,
                                 double kappa, double B, double K, std::size_t grid_n);

/// Budget slack allowed by grid_search_static, relative to w0.
inline constexpr double kGridBudgetSlack = 1e-4;

}  // namespace dcvar::oracle
