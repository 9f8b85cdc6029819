#include "dcvar/oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "dcvar/error.hpp"

namespace dcvar::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSpan = 40.0;

double integrand(const LognormalParams& lp, int p, double s) {
    const double u = (s - lp.m0) / lp.nu0;
    return std::exp(p * s - 0.5 * u * u) / (lp.nu0 * std::sqrt(2.0 * std::numbers::pi));
}

double segment(const LognormalParams& lp, int p, double s0, double s1) {
    if (!(s1 > s0)) return 0.0;
    auto f = [&](double s) { return integrand(lp, p, s); };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, s0, s1, 15, 1e-13);
}

double support_lo(const LognormalParams& lp) { return lp.m0 - kSpan * lp.nu0; }
double support_hi(const LognormalParams& lp, int p) {
    return lp.m0 + p * lp.nu0 * lp.nu0 + kSpan * lp.nu0;
}

}  // namespace

double quad_H(const LognormalParams& params, int p, double y) {
    if (y <= 0.0) return 0.0;
    const double lo = support_lo(params);
    const double hi = support_hi(params, p);
    const double top = y == kInf ? hi : std::min(std::log(y), hi);
    // Split at the mode of the integrand so each piece is unimodal-monotone.
    const double mode = params.m0 + p * params.nu0 * params.nu0;
    if (top <= mode) return segment(params, p, lo, top);
    return segment(params, p, lo, mode) + segment(params, p, mode, top);
}

StaticOptimum grid_search_static(const LognormalParams& params, double w0, double alpha,
                                 double kappa, double B, double K, std::size_t grid_n) {
    if (grid_n < 2) throw Error(ErrorKind::DomainError, "grid_n must be >= 2");
    const double c = 1.0 / (1.0 - kappa);
    const double lo = params.m0 - 8.0 * params.nu0;
    const double hi = params.m0 + 8.0 * params.nu0;

    // Node 0 is Z-threshold 0, node grid_n + 1 is +inf.
    const std::size_t nodes = grid_n + 2;
    std::vector<double> level(nodes), h0(nodes), h1(nodes);
    level[0] = 0.0;
    level[nodes - 1] = kInf;
    h0[0] = h1[0] = 0.0;
    double prev_s = support_lo(params);
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t k = 0; k < grid_n; ++k) {
        const double s = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid_n - 1);
        c0 += segment(params, 0, prev_s, s);
        c1 += segment(params, 1, prev_s, s);
        prev_s = s;
        level[k + 1] = std::exp(s);
        h0[k + 1] = c0;
        h1[k + 1] = c1;
    }
    h0[nodes - 1] = quad_H(params, 0, kInf);
    h1[nodes - 1] = quad_H(params, 1, kInf);

    const double budget_cap = w0 * (1.0 + kGridBudgetSlack);
    StaticOptimum best;
    bool found = false;
    for (std::size_t i = 0; i < nodes; ++i) {
        for (std::size_t j = i; j < nodes; ++j) {
            const double budget = B * h1[i] - alpha * (h1[j] - h1[i]);
            if (budget > budget_cap) break;  // increasing in j
            const double constraint = (B + alpha) * h0[i] + (c - 1.0) * (-alpha) * (1.0 - h0[j]);
            if (constraint > K) continue;
            const double expected = B * h0[i] - alpha * (h0[j] - h0[i]);
            if (!found || expected > best.expected) {
                best = {level[i], level[j], expected, budget, constraint};
                found = true;
            }
        }
    }
    if (!found) throw Error(ErrorKind::NoFeasibleGridPoint, "no grid pair meets both constraints");
    return best;
}

}  // namespace dcvar::oracle
