#pragma once

#include <cmath>
#include <vector>

#include "dcvar/gaussian_kit.hpp"
#include "dcvar/market_model.hpp"
#include "dcvar/multiplier_solver.hpp"

namespace dcvar::testing {

// Four-asset reference market used throughout the suite.
inline MarketParams four_asset_params() {
    MarketParams p;
    p.horizon = 1.0;
    p.riskfree = 0.02;
    p.s0 = {100.0, 100.0, 100.0, 100.0};
    p.mu = {0.09, 0.15, 0.21, 0.12};
    p.vol = {0.08, 0.12, 0.15, 0.08};
    p.corr = Matrix(4);
    const double c[4][4] = {{1.0, 0.2, -0.3, 0.0},
                            {0.2, 1.0, 0.15, -0.2},
                            {-0.3, 0.15, 1.0, 0.3},
                            {0.0, -0.2, 0.3, 1.0}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) p.corr(i, j) = c[i][j];
    return p;
}

inline DerivedMarket four_asset_market() { return build_market(four_asset_params()); }

inline LognormalStatePrice four_asset_law() {
    const DerivedMarket m = four_asset_market();
    return LognormalStatePrice(m.m0, m.nu0);
}

inline ProblemSpec reference_spec(double alpha = -121.14) {
    return ProblemSpec{100.0, alpha, 0.99, 500.0, 30.0};
}

inline double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace dcvar::testing
