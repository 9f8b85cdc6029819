#pragma once

#include <cstddef>
#include <vector>

#include "dcvar/linalg.hpp"

namespace dcvar {

/// Constant-coefficient multi-asset Black–Scholes inputs.
struct MarketParams {
    double horizon = 1.0;        ///< T in years
    double riskfree = 0.0;       ///< constant short rate r
    std::vector<double> s0;      ///< initial prices
    std::vector<double> mu;      ///< drifts
    std::vector<double> vol;     ///< volatilities per sqrt(year)
    Matrix corr;                 ///< correlation, unit diagonal
};

struct StatePriceMoments {
    double m = 0.0;   ///< mean of ln(Z_T / Z_t)
    double nu = 0.0;  ///< std dev of ln(Z_T / Z_t)
};

/// Quantities derived once from MarketParams. Immutable after build_market.
struct DerivedMarket {
    MarketParams params;
    Matrix gamma;                        ///< covariance vol_i corr_ij vol_j
    Matrix sigma;                        ///< lower Cholesky factor of gamma
    std::vector<double> excess;          ///< b = mu - r
    std::vector<double> theta;           ///< market price of risk, sigma^{-1} b
    std::vector<double> merton;          ///< (sigma sigma^T)^{-1} b
    double theta_norm = 0.0;
    double m0 = 0.0;
    double nu0 = 0.0;
    double expected_z = 1.0;             ///< E[Z_T] = exp(-rT)

    [[nodiscard]] std::size_t n_assets() const noexcept { return excess.size(); }
    [[nodiscard]] double horizon() const noexcept { return params.horizon; }
    [[nodiscard]] double riskfree() const noexcept { return params.riskfree; }
};

DerivedMarket build_market(const MarketParams& params);

/// Moments of ln(Z_T/Z_t) for t in [0, T].
StatePriceMoments state_price_moments(const DerivedMarket& mkt, double t);

/// exp(-r (t1 - t0)) for 0 <= t0 <= t1 <= T.
double discount(const DerivedMarket& mkt, double t0, double t1);

}  // namespace dcvar
