#include "dcvar/policy.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dcvar/error.hpp"

namespace dcvar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegenerateNu = 1e-12;
constexpr int kScanPoints = 64;

double log_or_limit(double x) {
    if (x <= 0.0) return -kInf;
    return std::log(x);
}

struct Standardized {
    double growth;  // exp(m + nu^2/2)
    double y1;
    double y2;
    double nu;
};

Standardized standardize(const StatePriceMoments& mom, const PolicySolution& sol, double Zt) {
    const double log_z = std::log(Zt);
    Standardized s;
    s.nu = mom.nu;
    s.growth = std::exp(mom.m + 0.5 * mom.nu * mom.nu);
    s.y1 = (log_or_limit(sol.threshold_a) - log_z - mom.m) / mom.nu;
    s.y2 = (log_or_limit(sol.threshold_b) - log_z - mom.m) / mom.nu;
    return s;
}

void check_time(const DerivedMarket& mkt, double t) {
    if (!(t >= 0.0 && t <= mkt.horizon()))
        throw Error(ErrorKind::OutOfHorizon, "t=" + std::to_string(t));
}

}  // namespace

void AlphaSearchConfig::validate() const {
    if (!(zeta > 0.0)) throw Error(ErrorKind::InvalidConfig, "alpha search zeta must be positive");
    if (!(eps > 0.0)) throw Error(ErrorKind::InvalidConfig, "alpha search eps must be positive");
    if (!(step_scale > 0.0)) throw Error(ErrorKind::InvalidConfig, "step_scale must be positive");
    if (max_iters < 1) throw Error(ErrorKind::InvalidConfig, "max_iters must be >= 1");
}

PolicySolution solve_policy(const StatePriceDistribution& dist, const ProblemSpec& spec) {
    spec.validate();
    PolicySolution sol;
    sol.spec = spec;
    sol.bounds = k_bounds(dist, spec);
    sol.multipliers = solve_multipliers(dist, spec, sol.bounds);
    sol.case_tag = sol.multipliers.case_tag;
    sol.threshold_a = sol.multipliers.delta;
    sol.threshold_b = sol.multipliers.rho == kInf ? kInf : sol.multipliers.delta + sol.multipliers.rho;
    sol.expected_terminal = expected_terminal(dist, sol);
    return sol;
}

PolicySolution risk_free_solution(const StatePriceDistribution& dist, const ProblemSpec& base) {
    PolicySolution sol;
    sol.spec = base;
    sol.spec.alpha = -base.w0 / dist.expected_z();
    sol.multipliers = {1.0, 0.0, 0.0, kInf, CaseTag::RiskFreeOnly};
    sol.case_tag = CaseTag::RiskFreeOnly;
    sol.threshold_a = 0.0;
    sol.threshold_b = kInf;
    sol.bounds = {0.0, kInf, 0.0, 0.0};
    sol.expected_terminal = -sol.spec.alpha;
    return sol;
}

double terminal_wealth(double z, const PolicySolution& sol) {
    if (z <= sol.threshold_a) return sol.spec.B;
    if (z <= sol.threshold_b) return -sol.spec.alpha;
    return 0.0;
}

double expected_terminal(const StatePriceDistribution& dist, const PolicySolution& sol) {
    if (sol.case_tag == CaseTag::RiskFreeOnly) return -sol.spec.alpha;
    const double pa = dist.h0(sol.threshold_a);
    const double pb = dist.h0(sol.threshold_b);
    return sol.spec.B * pa - sol.spec.alpha * (pb - pa);
}

double wealth_at(const DerivedMarket& mkt, const PolicySolution& sol, double t, double Zt) {
    check_time(mkt, t);
    if (!(Zt > 0.0)) throw Error(ErrorKind::DomainError, "state-price level must be positive");
    if (sol.case_tag == CaseTag::RiskFreeOnly)
        return -sol.spec.alpha * discount(mkt, t, mkt.horizon());
    const StatePriceMoments mom = state_price_moments(mkt, t);
    if (mom.nu < kDegenerateNu) return terminal_wealth(Zt, sol);
    const Standardized s = standardize(mom, sol, Zt);
    const double B = sol.spec.B;
    const double alpha = sol.spec.alpha;
    return s.growth *
           ((B + alpha) * std_normal_cdf(s.y1 - s.nu) - alpha * std_normal_cdf(s.y2 - s.nu));
}

double risky_exposure(const DerivedMarket& mkt, const PolicySolution& sol, double t, double Zt) {
    check_time(mkt, t);
    if (sol.case_tag == CaseTag::RiskFreeOnly) return 0.0;
    const StatePriceMoments mom = state_price_moments(mkt, t);
    if (mom.nu < kDegenerateNu)
        throw Error(ErrorKind::DegenerateVol, "nu(t) vanishes at t=" + std::to_string(t));
    const Standardized s = standardize(mom, sol, Zt);
    const double B = sol.spec.B;
    const double alpha = sol.spec.alpha;
    const double d1 = s.y1 - s.nu;
    const double d2 = s.y2 - s.nu;
    return s.growth / (std::sqrt(2.0 * std::numbers::pi) * s.nu) *
           ((B + alpha) * std::exp(-0.5 * d1 * d1) - alpha * std::exp(-0.5 * d2 * d2));
}

AllocationState allocation_at(const DerivedMarket& mkt, const PolicySolution& sol, double t,
                              double Zt, std::span<const double> prices) {
    const std::size_t n = mkt.n_assets();
    if (prices.size() != n) throw Error(ErrorKind::DimensionMismatch, "price vector size");
    AllocationState st;
    st.t = t;
    st.Zt = Zt;
    st.wealth = wealth_at(mkt, sol, t, Zt);
    const double exposure = risky_exposure(mkt, sol, t, Zt);
    st.risky_value.resize(n);
    st.shares.resize(n);
    double invested = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        st.risky_value[i] = exposure * mkt.merton[i];
        st.shares[i] = st.risky_value[i] / prices[i];
        invested += st.risky_value[i];
    }
    st.cash = st.wealth - invested;
    return st;
}

bool alpha_feasible(const StatePriceDistribution& dist, const ProblemSpec& spec) {
    if (!(spec.alpha < 0.0) || !(spec.B + spec.alpha > 0.0)) return false;
    try {
        const RiskBounds rb = k_bounds(dist, spec);
        const double lo_tol = kBoundaryTol * std::max(1.0, std::abs(rb.k_lower));
        const double hi_tol = kBoundaryTol * std::max(1.0, std::abs(rb.k_upper));
        return spec.K >= rb.k_lower - lo_tol && spec.K <= rb.k_upper + hi_tol;
    } catch (const Error&) {
        return false;
    }
}

double alpha_value(const StatePriceDistribution& dist, double w0, double K, double kappa, double B,
                   double alpha) {
    const ProblemSpec spec{w0, alpha, kappa, B, K};
    if (!alpha_feasible(dist, spec)) return kInf;
    try {
        return solve_policy(dist, spec).expected_terminal;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InfeasibleK || e.kind() == ErrorKind::InfeasibleSpec) return kInf;
        throw;
    }
}

namespace {

class AlphaObjective {
public:
    AlphaObjective(const StatePriceDistribution& dist, const ProblemSpec& base)
        : dist_(dist), base_(base) {}

    [[nodiscard]] ProblemSpec at(double alpha) const {
        ProblemSpec s = base_;
        s.alpha = alpha;
        return s;
    }
    [[nodiscard]] bool feasible(double alpha) const { return alpha_feasible(dist_, at(alpha)); }
    // -inf marks infeasibility so that comparisons read as maximization.
    [[nodiscard]] double value(double alpha) const {
        const double v = alpha_value(dist_, base_.w0, base_.K, base_.kappa, base_.B, alpha);
        return std::isfinite(v) ? v : -kInf;
    }
    [[nodiscard]] double lowest() const { return -base_.B; }

private:
    const StatePriceDistribution& dist_;
    ProblemSpec base_;
};

// Walks from a feasible alpha toward an infeasible one and returns the last
// feasible point on the segment.
double feasibility_edge(const AlphaObjective& obj, double inside, double outside) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (inside + outside);
        if (mid == inside || mid == outside) break;
        if (obj.feasible(mid)) inside = mid; else outside = mid;
    }
    return inside;
}

}  // namespace

std::vector<double> alpha_scan_grid(const ProblemSpec& base, double expected_z) {
    std::vector<double> grid;
    grid.reserve(kScanPoints + 1);
    const double hi = base.w0 / 100.0;
    const double lo = base.B * (1.0 - 1e-9);
    for (int j = 0; j < kScanPoints; ++j) {
        const double frac = static_cast<double>(j) / (kScanPoints - 1);
        grid.push_back(-hi * std::pow(lo / hi, frac));
    }
    const double anchor = -base.w0 / expected_z;
    if (anchor > -base.B) grid.push_back(anchor);
    return grid;
}

OptimizedPolicy optimize_alpha(const StatePriceDistribution& dist, const ProblemSpec& base,
                               const AlphaSearchConfig& cfg) {
    cfg.validate();
    if (!(base.w0 > 0.0) || !(base.kappa > 0.5 && base.kappa < 1.0))
        throw Error(ErrorKind::InfeasibleSpec, "w0 > 0 and kappa in (0.5, 1) required");
    if (base.w0 / base.B >= dist.expected_z())
        throw Error(ErrorKind::InfeasibleSpec, "cap B unreachable: w0/B >= E[Z]");

    if (dist.degenerate()) {
        if (base.K < 0.0) throw Error(ErrorKind::NoFeasibleAlpha, "K < 0 in a riskless market");
        return {risk_free_solution(dist, base), 0, 0.0, true};
    }

    const AlphaObjective obj(dist, base);

    // Feasibility pre-scan: geometric grid on (-B, -w0/100] plus the level
    // alpha = -w0 e^{rT} where k_lower vanishes.
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double value = -kInf;
    auto consider = [&](double a) {
        if (!(a < 0.0) || !(a > obj.lowest())) return;
        const double v = obj.value(a);
        if (v > value) {
            value = v;
            alpha = a;
        }
    };
    if (cfg.alpha0 < 0.0 && obj.feasible(cfg.alpha0)) {
        consider(cfg.alpha0);
    } else {
        for (double a : alpha_scan_grid(base, dist.expected_z())) consider(a);
    }
    if (!std::isfinite(value))
        throw Error(ErrorKind::NoFeasibleAlpha,
                    "no alpha in (-B, 0) admits K=" + std::to_string(base.K));

    auto slope_at = [&](double a, double va) {
        const double fwd = a + cfg.zeta;
        if (fwd < 0.0) {
            const double vf = obj.value(fwd);
            if (std::isfinite(vf)) return (vf - va) / cfg.zeta;
        }
        const double bwd = a - cfg.zeta;
        if (bwd > obj.lowest()) {
            const double vb = obj.value(bwd);
            if (std::isfinite(vb)) return (va - vb) / cfg.zeta;
        }
        return 0.0;
    };

    OptimizedPolicy out;
    double step_scale = cfg.step_scale;
    double slope = 0.0;
    int iter = 0;
    for (; iter < cfg.max_iters; ++iter) {
        slope = slope_at(alpha, value);
        if (std::abs(slope) <= cfg.eps) break;

        double trial = alpha + step_scale * slope;
        if (trial >= 0.0) trial = 0.5 * alpha;
        if (trial <= obj.lowest()) trial = 0.5 * (alpha + obj.lowest());
        bool clipped = false;
        if (!obj.feasible(trial)) {
            trial = feasibility_edge(obj, alpha, trial);
            clipped = true;
        }
        if (clipped && std::abs(trial - alpha) <= 1e-12 * std::max(1.0, std::abs(alpha))) {
            out.on_boundary = true;
            break;
        }
        const double vt = obj.value(trial);
        if (vt > value) {
            alpha = trial;
            value = vt;
            out.on_boundary = clipped;
        } else {
            step_scale *= 0.5;
            if (step_scale * std::abs(slope) <= 1e-13 * std::max(1.0, std::abs(alpha))) break;
        }
    }

    out.solution = solve_policy(dist, obj.at(alpha));
    out.iterations = iter;
    out.slope = slope;
    return out;
}

AtomProbabilities atom_probabilities(const PolicySolution& sol, double K) {
    const double alpha = sol.spec.alpha;
    const double E = sol.expected_terminal;
    AtomProbabilities p;
    p.p_zero = (K - E - alpha) * (1.0 - sol.spec.kappa) / (-alpha);
    p.p_cap = (E + alpha * (1.0 - p.p_zero)) / (sol.spec.B + alpha);
    p.p_alpha = 1.0 - p.p_zero - p.p_cap;
    return p;
}

AtomProbabilities atom_probabilities(const StatePriceDistribution& dist, const PolicySolution& sol) {
    AtomProbabilities p;
    if (sol.case_tag == CaseTag::RiskFreeOnly) {
        p.p_alpha = 1.0;
        return p;
    }
    const double pa = dist.h0(sol.threshold_a);
    const double pb = dist.h0(sol.threshold_b);
    p.p_cap = pa;
    p.p_zero = 1.0 - pb;
    p.p_alpha = pb - pa;
    return p;
}

AsymptoticBounds asymptotic_k_bounds(const LognormalStatePrice& dist, double w0, double alpha,
                                     double kappa) {
    const double ez = dist.expected_z();
    const double c = 1.0 / (1.0 - kappa);
    AsymptoticBounds out;
    if (w0 < -alpha * ez) {
        out.k_lower = -alpha * (1.0 - c) *
                      (std_normal_cdf(std_normal_quantile(w0 / (-alpha * ez)) + dist.nu0()) - 1.0);
    } else {
        out.k_lower = w0 / ez + alpha;
    }
    out.k_upper = w0 / ez - alpha * (c - 1.0);
    return out;
}

}  // namespace dcvar
