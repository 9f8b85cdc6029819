#include "dcvar/multiplier_solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dcvar/error.hpp"

namespace dcvar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxBisection = 200;

bool near(double x, double target) {
    return std::abs(x - target) <= kBoundaryTol * std::max(1.0, std::abs(target));
}

}  // namespace

void ProblemSpec::validate() const {
    if (!(w0 > 0.0)) throw Error(ErrorKind::InfeasibleSpec, "w0 must be positive");
    if (!(kappa > 0.5 && kappa < 1.0))
        throw Error(ErrorKind::InfeasibleSpec, "kappa must lie in (0.5, 1)");
    if (!(alpha < 0.0)) throw Error(ErrorKind::InfeasibleSpec, "alpha must be negative");
    if (!(B + alpha > 0.0)) throw Error(ErrorKind::InfeasibleSpec, "B + alpha must be positive");
}

std::string_view to_string(CaseTag tag) noexcept {
    switch (tag) {
        case CaseTag::Interior: return "Interior";
        case CaseTag::RiskFreeOnly: return "RiskFreeOnly";
        case CaseTag::LowK_LowWealth: return "LowK_LowWealth";
        case CaseTag::LowK_HighWealth: return "LowK_HighWealth";
        case CaseTag::HighK: return "HighK";
    }
    return "Unknown";
}

Multipliers multipliers_from_thresholds(double delta, double rho, double kappa, CaseTag tag) {
    Multipliers out;
    out.delta = delta;
    out.rho = rho;
    out.case_tag = tag;
    if (rho == kInf) {
        // eta -> 0 and lambda -> 1 in the limit.
        out.lambda = 1.0;
        out.eta = 0.0;
        return out;
    }
    const double scaled = rho * (1.0 - kappa);
    out.eta = 1.0 / (scaled + delta);
    out.lambda = scaled / (scaled + delta);
    return out;
}

double budget_value(const StatePriceDistribution& dist, const ProblemSpec& spec, double delta,
                    double rho) {
    const double h1_delta = dist.h1(delta);
    const double upper = (delta == kInf || rho == kInf) ? kInf : delta + rho;
    return spec.B * h1_delta - spec.alpha * (dist.h1(upper) - h1_delta);
}

double constraint_value(const StatePriceDistribution& dist, const ProblemSpec& spec, double a,
                        double b) {
    return (spec.B + spec.alpha) * dist.h0(a) -
           spec.alpha * (1.0 - spec.tail_weight()) * (dist.h0(b) - 1.0);
}

namespace {

// Argument of H1^{-1} in the budget elimination.
double budget_residual_level(const StatePriceDistribution& dist, const ProblemSpec& spec,
                             double delta) {
    return (spec.w0 - (spec.B + spec.alpha) * dist.h1(delta)) / (-spec.alpha);
}

double upper_threshold(const StatePriceDistribution& dist, const ProblemSpec& spec, double delta) {
    const double q = budget_residual_level(dist, spec, delta);
    const double ez = dist.expected_z();
    const double slack = kBoundaryTol * ez;
    if (q < -slack || q > ez + slack)
        throw Error(ErrorKind::InfeasibleDelta,
                    "delta=" + std::to_string(delta) + " gives H1 level " + std::to_string(q));
    return h1_inverse_saturating(dist, q);
}

}  // namespace

double rho_from_budget(const StatePriceDistribution& dist, const ProblemSpec& spec, double delta) {
    const double upper = upper_threshold(dist, spec, delta);
    if (upper == kInf) return kInf;
    return std::max(0.0, upper - delta);
}

double risk_curve(const StatePriceDistribution& dist, const ProblemSpec& spec, double delta) {
    const double upper = upper_threshold(dist, spec, delta);
    return constraint_value(dist, spec, delta, upper);
}

DeltaBounds delta_bounds(const StatePriceDistribution& dist, const ProblemSpec& spec) {
    spec.validate();
    const double ez = dist.expected_z();
    if (spec.w0 / spec.B >= ez)
        throw Error(ErrorKind::InfeasibleSpec,
                    "cap B=" + std::to_string(spec.B) + " unreachable: w0/B >= E[Z]");
    DeltaBounds out;
    out.lower = spec.w0 < -spec.alpha * ez
                    ? 0.0
                    : h1_inverse_saturating(dist, (spec.w0 + spec.alpha * ez) / (spec.B + spec.alpha));
    out.upper = h1_inverse_saturating(dist, spec.w0 / spec.B);
    return out;
}

RiskBounds k_bounds(const StatePriceDistribution& dist, const ProblemSpec& spec) {
    const DeltaBounds db = delta_bounds(dist, spec);
    const double ez = dist.expected_z();
    const double c = spec.tail_weight();
    RiskBounds out;
    out.delta_lower = db.lower;
    out.delta_upper = db.upper;
    if (spec.w0 < -spec.alpha * ez) {
        const double q = spec.w0 / (-spec.alpha);
        out.k_lower = -spec.alpha * (1.0 - c) * (dist.h0(h1_inverse_saturating(dist, q)) - 1.0);
    } else {
        out.k_lower = (spec.B + spec.alpha) * dist.h0(db.lower);
    }
    const double h0_upper = dist.h0(db.upper);
    out.k_upper = spec.B * h0_upper - spec.alpha * (c * (1.0 - h0_upper) - 1.0);
    return out;
}

RiskBounds k_bounds_closed_form(const LognormalStatePrice& dist, const ProblemSpec& spec) {
    spec.validate();
    const double ez = dist.expected_z();
    const double nu = dist.nu0();
    const double c = spec.tail_weight();
    if (spec.w0 / spec.B >= ez) throw Error(ErrorKind::InfeasibleSpec, "w0/B >= E[Z]");
    // H0(H1^{-1}(q)) = Phi(Phi^{-1}(q/E[Z]) + nu0)
    auto composite = [&](double q) {
        if (q <= 0.0) return 0.0;
        if (q >= ez) return 1.0;
        return std_normal_cdf(std_normal_quantile(q / ez) + nu);
    };
    RiskBounds out;
    const DeltaBounds db = delta_bounds(dist, spec);
    out.delta_lower = db.lower;
    out.delta_upper = db.upper;
    if (spec.w0 < -spec.alpha * ez) {
        out.k_lower = -spec.alpha * (1.0 - c) * (composite(spec.w0 / (-spec.alpha)) - 1.0);
    } else {
        out.k_lower = (spec.B + spec.alpha) *
                      composite((spec.w0 / ez + spec.alpha) / (spec.B + spec.alpha) * ez);
    }
    const double p_upper = composite(spec.w0 / spec.B);
    out.k_upper = spec.B * p_upper - spec.alpha * (c * (1.0 - p_upper) - 1.0);
    return out;
}

Multipliers solve_multipliers(const StatePriceDistribution& dist, const ProblemSpec& spec) {
    return solve_multipliers(dist, spec, k_bounds(dist, spec));
}

Multipliers solve_multipliers(const StatePriceDistribution& dist, const ProblemSpec& spec,
                              const RiskBounds& bounds) {
    const double K = spec.K;
    const double ez = dist.expected_z();
    const bool at_lower = near(K, bounds.k_lower);
    const bool at_upper = near(K, bounds.k_upper);
    if (!at_lower && !at_upper && (K < bounds.k_lower || K > bounds.k_upper))
        throw Error(ErrorKind::InfeasibleK, "K=" + std::to_string(K) + " outside [" +
                                                std::to_string(bounds.k_lower) + ", " +
                                                std::to_string(bounds.k_upper) + "]");

    const double full_cost = -spec.alpha * ez;
    if (at_lower) {
        if (near(spec.w0, full_cost))
            return {1.0, 0.0, 0.0, kInf, CaseTag::RiskFreeOnly};
        if (spec.w0 < full_cost) {
            const double rho = h1_inverse_saturating(dist, spec.w0 / (-spec.alpha));
            return multipliers_from_thresholds(0.0, rho, spec.kappa, CaseTag::LowK_LowWealth);
        }
        return multipliers_from_thresholds(bounds.delta_lower, kInf, spec.kappa,
                                           CaseTag::LowK_HighWealth);
    }
    if (at_upper)
        return multipliers_from_thresholds(bounds.delta_upper, 0.0, spec.kappa, CaseTag::HighK);

    // Interior: L is increasing on [delta_lower, delta_upper]; bisect L(delta) = K
    // until the bracket collapses so that R(alpha) is smooth in alpha.
    double lo = bounds.delta_lower;
    double hi = bounds.delta_upper;
    double mid = 0.5 * (lo + hi);
    const double tol = kBoundaryTol * std::max(1.0, std::abs(K));
    double resid = risk_curve(dist, spec, mid) - K;
    for (int it = 0; it < kMaxBisection; ++it) {
        if (resid == 0.0) break;
        if (resid < 0.0) lo = mid; else hi = mid;
        const double next = 0.5 * (lo + hi);
        if (next <= lo || next >= hi) break;
        mid = next;
        resid = risk_curve(dist, spec, mid) - K;
    }
    if (std::abs(resid) > tol)
        throw Error(ErrorKind::InfeasibleK,
                    "bisection residual " + std::to_string(resid) + " above tolerance");
    double delta = mid;
    double rho = rho_from_budget(dist, spec, delta);
    if (delta <= 0.0) {
        // delta clamped at zero: lambda = 1 by convention.
        delta = 0.0;
        return {1.0, 1.0 / ((1.0 - spec.kappa) * rho), 0.0, rho, CaseTag::Interior};
    }
    return multipliers_from_thresholds(delta, rho, spec.kappa, CaseTag::Interior);
}

}  // namespace dcvar
