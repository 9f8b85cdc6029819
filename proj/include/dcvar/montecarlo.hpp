#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dcvar/market_model.hpp"
#include "dcvar/policy.hpp"

namespace dcvar {

struct PathConfig {
    std::size_t n_paths = 1;
    std::size_t n_steps = 1;
    std::uint64_t seed = 0;
    std::size_t rebalance_steps = 0;  ///< 0 means every step

    [[nodiscard]] std::size_t rebalance_count() const noexcept {
        return rebalance_steps == 0 ? n_steps : rebalance_steps;
    }
    void validate() const;
};

/// xoshiro256** keyed by (seed, path index), so every path owns an
/// independent stream and results do not depend on scheduling.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path);

    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Standard normal, Marsaglia polar method.
    double normal() noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// One simulated path on the uniform grid t_k = k T / n_steps.
struct Path {
    std::vector<double> times;
    std::vector<double> prices;        ///< row-major (n_steps + 1) x n_assets
    std::vector<double> state_price;   ///< Z_{t_k}

    [[nodiscard]] std::span<const double> prices_at(std::size_t k, std::size_t n_assets) const {
        return {prices.data() + k * n_assets, n_assets};
    }
};

/// Exact log-Euler scheme for the assets and Z driven by the same Brownian increments.
Path simulate_path(const DerivedMarket& mkt, const PathConfig& cfg, std::size_t path_index);

/// All paths of the ensemble. Memory grows as n_paths * n_steps * n_assets.
std::vector<Path> simulate_paths(const DerivedMarket& mkt, const PathConfig& cfg);

struct TerminalSample {
    std::vector<double> z;       ///< Z_T per path
    std::vector<double> prices;  ///< row-major n_paths x n_assets, S_T
};

/// Terminal values only; consumes the same random stream as simulate_path.
TerminalSample simulate_terminal(const DerivedMarket& mkt, const PathConfig& cfg);

struct ReplicationPath {
    double replicated = 0.0;  ///< self-financing wealth at T
    double z_terminal = 0.0;
    double payoff = 0.0;      ///< M*(Z_T)
    double min_cash = 0.0;    ///< most negative cash position seen at rebalancing
};

/// Discretely rebalanced replication of the optimal policy. Holdings are reset
/// at t_k for k multiple of n_steps / rebalance_count() and frozen over the last interval.
std::vector<ReplicationPath> replicate(const DerivedMarket& mkt, const PolicySolution& sol,
                                       const PathConfig& cfg);

struct AtomLevels {
    double zero = 0.0;
    double alpha_level = 0.0;  ///< -alpha
    double cap = 0.0;          ///< B
};

struct TerminalStats {
    double mean = 0.0;
    double var_kappa = 0.0;    ///< VaR_kappa of -V_T
    double cvar_kappa = 0.0;   ///< CVaR_kappa of -V_T
    double dcvar_kappa = 0.0;  ///< mean + cvar
    std::array<double, 3> atom_freqs{};  ///< nearest-atom masses at {0, -alpha, B}
    double std_error = 0.0;
    std::size_t count = 0;
};

/// Lower kappa-quantile of the loss -V.
double empirical_var(std::span<const double> values, double kappa);

/// CVaR of -V through VaR + (1-kappa)^{-1} E[(-V - VaR)^+].
double cvar_minimization(std::span<const double> values, double kappa);

/// CVaR of -V as the average of the worst (1-kappa) mass, splitting the atom at VaR.
double cvar_tail_average(std::span<const double> values, double kappa);

TerminalStats terminal_stats(std::span<const double> values, double kappa,
                             std::optional<AtomLevels> atoms = std::nullopt);

struct FrontierPoint {
    double K = 0.0;
    double B = 0.0;
    bool feasible = false;
    double alpha_star = 0.0;
    double expected_terminal = 0.0;
    double k_lower = 0.0;
    double k_upper = 0.0;
    CaseTag case_tag = CaseTag::Interior;
};

/// Optimal expected terminal wealth along a K grid; infeasible points are flagged.
std::vector<FrontierPoint> frontier(const StatePriceDistribution& dist, double w0, double kappa,
                                    double B, std::span<const double> k_grid,
                                    const AlphaSearchConfig& cfg = {});

/// Same sweep along the cap B at fixed K.
std::vector<FrontierPoint> cap_sweep(const StatePriceDistribution& dist, double w0, double kappa,
                                     double K, std::span<const double> b_grid,
                                     const AlphaSearchConfig& cfg = {});

/// Threads used by the data-parallel loops: DCVAR_THREADS if set and positive,
/// otherwise the hardware concurrency.
std::size_t worker_count();

/// Runs fn(begin, end) over contiguous chunks of [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace dcvar
