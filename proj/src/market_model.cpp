#include "dcvar/market_model.hpp"

#include <cmath>
#include <string>

#include "dcvar/error.hpp"

namespace dcvar {

namespace {

void validate(const MarketParams& p) {
    const std::size_t n = p.mu.size();
    if (n == 0) throw Error(ErrorKind::DimensionMismatch, "no risky assets");
    if (p.vol.size() != n || p.s0.size() != n || p.corr.size() != n)
        throw Error(ErrorKind::DimensionMismatch,
                    "mu/vol/s0/corr sizes disagree (n=" + std::to_string(n) + ")");
    if (!(p.horizon > 0.0)) throw Error(ErrorKind::DomainError, "horizon must be positive");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(p.vol[i] > 0.0)) throw Error(ErrorKind::DomainError, "vol must be positive");
        if (!(p.s0[i] > 0.0)) throw Error(ErrorKind::DomainError, "initial price must be positive");
        if (p.corr(i, i) != 1.0)
            throw Error(ErrorKind::NotPositiveDefinite, "correlation diagonal must be exactly 1");
        for (std::size_t j = 0; j < i; ++j)
            if (p.corr(i, j) != p.corr(j, i))
                throw Error(ErrorKind::NotPositiveDefinite, "correlation must be symmetric");
    }
}

}  // namespace

DerivedMarket build_market(const MarketParams& params) {
    validate(params);
    const std::size_t n = params.mu.size();

    DerivedMarket mkt;
    mkt.params = params;
    mkt.gamma = Matrix(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            mkt.gamma(i, j) = params.vol[i] * params.corr(i, j) * params.vol[j];

    mkt.sigma = cholesky_lower(mkt.gamma);
    mkt.excess.resize(n);
    for (std::size_t i = 0; i < n; ++i) mkt.excess[i] = params.mu[i] - params.riskfree;

    mkt.theta = forward_substitute(mkt.sigma, mkt.excess);
    mkt.merton = back_substitute_transposed(mkt.sigma, mkt.theta);
    mkt.theta_norm = norm2(mkt.theta);

    const double T = params.horizon;
    const double r = params.riskfree;
    mkt.m0 = -(r + 0.5 * mkt.theta_norm * mkt.theta_norm) * T;
    mkt.nu0 = mkt.theta_norm * std::sqrt(T);
    mkt.expected_z = std::exp(-r * T);
    return mkt;
}

StatePriceMoments state_price_moments(const DerivedMarket& mkt, double t) {
    const double T = mkt.horizon();
    if (!(t >= 0.0 && t <= T)) throw Error(ErrorKind::OutOfHorizon, "t=" + std::to_string(t));
    const double tau = T - t;
    const double th2 = mkt.theta_norm * mkt.theta_norm;
    return {-(mkt.riskfree() + 0.5 * th2) * tau, mkt.theta_norm * std::sqrt(tau)};
}

double discount(const DerivedMarket& mkt, double t0, double t1) {
    const double T = mkt.horizon();
    if (!(t0 >= 0.0 && t0 <= t1 && t1 <= T))
        throw Error(ErrorKind::OutOfHorizon,
                    "discount interval [" + std::to_string(t0) + ", " + std::to_string(t1) + "]");
    return std::exp(-mkt.riskfree() * (t1 - t0));
}

}  // namespace dcvar
