#pragma once

#include <span>
#include <vector>

#include "dcvar/gaussian_kit.hpp"
#include "dcvar/market_model.hpp"
#include "dcvar/multiplier_solver.hpp"

namespace dcvar {

/// Optimal three-level terminal payoff for one alpha:
/// M* = B on {Z <= a}, -alpha on {a < Z <= b}, 0 on {Z > b}.
struct PolicySolution {
    ProblemSpec spec;
    Multipliers multipliers;
    RiskBounds bounds;
    double threshold_a = 0.0;   ///< (1-lambda)/eta
    double threshold_b = 0.0;   ///< (lambda((1-kappa)^{-1}-1)+1)/eta, may be +inf
    double expected_terminal = 0.0;
    CaseTag case_tag = CaseTag::Interior;

    [[nodiscard]] double alpha() const noexcept { return spec.alpha; }
};

struct AllocationState {
    double t = 0.0;
    double Zt = 0.0;
    double wealth = 0.0;
    std::vector<double> risky_value;  ///< currency held in each risky asset
    std::vector<double> shares;       ///< risky_value / S
    double cash = 0.0;
};

struct AlphaSearchConfig {
    double alpha0 = 0.0;   ///< initial guess; ignored unless negative and feasible
    double zeta = 1e-4;    ///< forward-difference step
    double step_scale = 10.0;
    double eps = 1e-5;     ///< stop when |dR/dalpha| <= eps
    int max_iters = 500;

    void validate() const;
};

struct OptimizedPolicy {
    PolicySolution solution;
    int iterations = 0;
    double slope = 0.0;      ///< last finite-difference slope of R
    bool on_boundary = false;  ///< optimum on the edge of the feasible alpha set
};

/// Solves the fixed-alpha problem carried by `spec`.
PolicySolution solve_policy(const StatePriceDistribution& dist, const ProblemSpec& spec);

double terminal_wealth(double z, const PolicySolution& sol);

/// E[M*] = B H0(a) - alpha (H0(b) - H0(a)).
double expected_terminal(const StatePriceDistribution& dist, const PolicySolution& sol);

/// V*_t as a function of the state-price level reached at t.
double wealth_at(const DerivedMarket& mkt, const PolicySolution& sol, double t, double Zt);

/// -Zt dV*/dZt, the total currency exposure to the risky basket.
double risky_exposure(const DerivedMarket& mkt, const PolicySolution& sol, double t, double Zt);

AllocationState allocation_at(const DerivedMarket& mkt, const PolicySolution& sol, double t,
                              double Zt, std::span<const double> prices);

/// R(alpha); +inf when K is outside [k_lower(alpha), k_upper(alpha)] or alpha >= 0.
double alpha_value(const StatePriceDistribution& dist, double w0, double K, double kappa, double B,
                   double alpha);

bool alpha_feasible(const StatePriceDistribution& dist, const ProblemSpec& spec);

/// Candidate alphas for the feasibility pre-scan: 64 geometric points on
/// (-B, -w0/100] and the level -w0 e^{rT} where k_lower vanishes.
std::vector<double> alpha_scan_grid(const ProblemSpec& base, double expected_z);

/// Gradient ascent on R(alpha) behind a feasibility pre-scan. `base.alpha` is ignored.
OptimizedPolicy optimize_alpha(const StatePriceDistribution& dist, const ProblemSpec& base,
                               const AlphaSearchConfig& cfg = {});

struct AtomProbabilities {
    double p_zero = 0.0;
    double p_cap = 0.0;
    double p_alpha = 0.0;
};

/// Atom masses from E[V*] and a binding constraint at K.
AtomProbabilities atom_probabilities(const PolicySolution& sol, double K);

/// Atom masses straight from H0 at the thresholds.
AtomProbabilities atom_probabilities(const StatePriceDistribution& dist, const PolicySolution& sol);

struct AsymptoticBounds {
    double k_lower = 0.0;
    double k_upper = 0.0;
};

/// Closed-form large-B limits of the K bounds for the lognormal law. Only the
/// lower limit in the w0 < -alpha E[Z] branch matches finite-B bounds; the
/// others diverge with B (see the unit tests).
AsymptoticBounds asymptotic_k_bounds(const LognormalStatePrice& dist, double w0, double alpha,
                                     double kappa);

/// Solution used when Z is a point mass: hold only the risk-free asset.
PolicySolution risk_free_solution(const StatePriceDistribution& dist, const ProblemSpec& base);

}  // namespace dcvar
