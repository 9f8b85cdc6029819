#pragma once

#include <string_view>

#include "dcvar/gaussian_kit.hpp"

namespace dcvar {

/// Static problem for a fixed auxiliary level alpha: maximize E[M] subject to
/// the DCVaR-type constraint, budget E[Z M] = w0 and 0 <= M <= B.
struct ProblemSpec {
    double w0 = 0.0;
    double alpha = 0.0;   ///< <= 0
    double kappa = 0.99;  ///< in (0.5, 1)
    double B = 0.0;       ///< wealth cap
    double K = 0.0;       ///< risk budget

    /// (1 - kappa)^{-1}
    [[nodiscard]] double tail_weight() const noexcept { return 1.0 / (1.0 - kappa); }
    void validate() const;
};

enum class CaseTag { Interior, RiskFreeOnly, LowK_LowWealth, LowK_HighWealth, HighK };

std::string_view to_string(CaseTag tag) noexcept;

/// Lagrange multipliers together with their threshold parametrization
/// delta = (1-lambda)/eta, rho = lambda (1-kappa)^{-1} / eta.
/// rho may be +inf (case LowK_HighWealth and RiskFreeOnly).
struct Multipliers {
    double lambda = 0.0;
    double eta = 0.0;
    double delta = 0.0;
    double rho = 0.0;
    CaseTag case_tag = CaseTag::Interior;
};

/// Maps thresholds to multipliers: eta = 1/(rho(1-kappa) + delta),
/// lambda = rho(1-kappa)/(rho(1-kappa) + delta).
Multipliers multipliers_from_thresholds(double delta, double rho, double kappa, CaseTag tag);

struct RiskBounds {
    double k_lower = 0.0;
    double k_upper = 0.0;
    double delta_lower = 0.0;
    double delta_upper = 0.0;
};

struct DeltaBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// I(delta, rho) = B H1(delta) - alpha (H1(delta + rho) - H1(delta)).
double budget_value(const StatePriceDistribution& dist, const ProblemSpec& spec, double delta,
                    double rho);

/// L(delta): the constraint value once rho is eliminated through the budget.
/// Throws InfeasibleDelta when delta lies outside its admissible interval.
double risk_curve(const StatePriceDistribution& dist, const ProblemSpec& spec, double delta);

/// The rho that makes budget_value(delta, rho) == w0.
double rho_from_budget(const StatePriceDistribution& dist, const ProblemSpec& spec, double delta);

DeltaBounds delta_bounds(const StatePriceDistribution& dist, const ProblemSpec& spec);

/// Feasible K interval for the spec's alpha, from the generic H functionals.
RiskBounds k_bounds(const StatePriceDistribution& dist, const ProblemSpec& spec);

/// Same bounds written with Phi / Phi^{-1} for the lognormal law.
RiskBounds k_bounds_closed_form(const LognormalStatePrice& dist, const ProblemSpec& spec);

/// Relative tolerance used to snap K onto a bound.
inline constexpr double kBoundaryTol = 1e-9;

/// Solves for (lambda, eta) given K in [k_lower, k_upper]; throws InfeasibleK otherwise.
Multipliers solve_multipliers(const StatePriceDistribution& dist, const ProblemSpec& spec);

/// Same, reusing bounds the caller already has.
Multipliers solve_multipliers(const StatePriceDistribution& dist, const ProblemSpec& spec,
                              const RiskBounds& bounds);

/// Left-hand side of the DCVaR constraint for the three-level payoff defined
/// by thresholds (a, b): (B+alpha) H0(a) - alpha (1 - (1-kappa)^{-1}) (H0(b) - 1).
double constraint_value(const StatePriceDistribution& dist, const ProblemSpec& spec, double a,
                        double b);

}  // namespace dcvar
