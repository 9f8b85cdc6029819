#include "dcvar/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "dcvar/error.hpp"

namespace dcvar {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) noexcept {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

// Per-step increments of (ln S, ln Z) for the exact lognormal scheme.
class Stepper {
public:
    Stepper(const DerivedMarket& mkt, std::size_t n_steps)
        : mkt_(mkt), n_(mkt.n_assets()), dt_(mkt.horizon() / static_cast<double>(n_steps)),
          sqrt_dt_(std::sqrt(dt_)), drift_(n_), shocks_(n_) {
        for (std::size_t i = 0; i < n_; ++i)
            drift_[i] = (mkt.params.mu[i] - 0.5 * mkt.gamma(i, i)) * dt_;
        z_drift_ = -(mkt.riskfree() + 0.5 * mkt.theta_norm * mkt.theta_norm) * dt_;
    }

    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] std::size_t n_assets() const noexcept { return n_; }

    void step(PathRng& rng, std::span<double> log_s, double& log_z) {
        for (std::size_t j = 0; j < n_; ++j) shocks_[j] = sqrt_dt_ * rng.normal();
        double z_shock = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double diffusion = 0.0;
            for (std::size_t j = 0; j <= i; ++j) diffusion += mkt_.sigma(i, j) * shocks_[j];
            log_s[i] += drift_[i] + diffusion;
            z_shock += mkt_.theta[i] * shocks_[i];
        }
        log_z += z_drift_ - z_shock;
    }

    void initial(std::span<double> log_s, double& log_z) const {
        for (std::size_t i = 0; i < n_; ++i) log_s[i] = std::log(mkt_.params.s0[i]);
        log_z = 0.0;
    }

private:
    const DerivedMarket& mkt_;
    std::size_t n_;
    double dt_;
    double sqrt_dt_;
    double z_drift_ = 0.0;
    std::vector<double> drift_;
    std::vector<double> shocks_;
};

std::size_t tail_count_index(std::size_t n, double kappa) {
    // smallest k (0-based) with (k+1)/n >= kappa
    const double pos = std::ceil(kappa * static_cast<double>(n) - 1e-9);
    const auto k = static_cast<std::size_t>(std::max(pos, 1.0)) - 1;
    return std::min(k, n - 1);
}

std::vector<double> sorted_losses(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorKind::EmptySample, "no values");
    std::vector<double> losses(values.size());
    std::transform(values.begin(), values.end(), losses.begin(), [](double v) { return -v; });
    std::sort(losses.begin(), losses.end());
    return losses;
}

void check_kappa(double kappa) {
    if (!(kappa > 0.5 && kappa < 1.0)) throw Error(ErrorKind::DomainError, "kappa must lie in (0.5, 1)");
}

}  // namespace

void PathConfig::validate() const {
    if (n_paths < 1) throw Error(ErrorKind::InvalidConfig, "n_paths must be >= 1");
    if (n_steps < 1) throw Error(ErrorKind::InvalidConfig, "n_steps must be >= 1");
    const std::size_t r = rebalance_count();
    if (r > n_steps || n_steps % r != 0)
        throw Error(ErrorKind::InvalidConfig, "rebalance_steps must divide n_steps");
}

PathRng::PathRng(std::uint64_t seed, std::uint64_t path) {
    std::uint64_t x = seed;
    std::uint64_t key = splitmix64(x) ^ (path * 0xd1b54a32d192ed03ULL);
    for (auto& word : s_) word = splitmix64(key);
}

std::uint64_t PathRng::next_u64() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double PathRng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double PathRng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

std::size_t worker_count() {
    if (const char* env = std::getenv("DCVAR_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(workers);
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, &failures, w, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
}

Path simulate_path(const DerivedMarket& mkt, const PathConfig& cfg, std::size_t path_index) {
    cfg.validate();
    Stepper stepper(mkt, cfg.n_steps);
    const std::size_t n = mkt.n_assets();
    PathRng rng(cfg.seed, path_index);
    Path path;
    path.times.resize(cfg.n_steps + 1);
    path.prices.resize((cfg.n_steps + 1) * n);
    path.state_price.resize(cfg.n_steps + 1);

    std::vector<double> log_s(n);
    double log_z = 0.0;
    stepper.initial(log_s, log_z);
    for (std::size_t k = 0; k <= cfg.n_steps; ++k) {
        if (k > 0) stepper.step(rng, log_s, log_z);
        path.times[k] = k == cfg.n_steps ? mkt.horizon() : static_cast<double>(k) * stepper.dt();
        for (std::size_t i = 0; i < n; ++i)
            path.prices[k * n + i] = k == 0 ? mkt.params.s0[i] : std::exp(log_s[i]);
        path.state_price[k] = std::exp(log_z);
    }
    return path;
}

std::vector<Path> simulate_paths(const DerivedMarket& mkt, const PathConfig& cfg) {
    cfg.validate();
    std::vector<Path> paths(cfg.n_paths);
    parallel_for(cfg.n_paths, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) paths[p] = simulate_path(mkt, cfg, p);
    });
    return paths;
}

TerminalSample simulate_terminal(const DerivedMarket& mkt, const PathConfig& cfg) {
    cfg.validate();
    const std::size_t n = mkt.n_assets();
    TerminalSample out;
    out.z.resize(cfg.n_paths);
    out.prices.resize(cfg.n_paths * n);
    parallel_for(cfg.n_paths, [&](std::size_t begin, std::size_t end) {
        Stepper stepper(mkt, cfg.n_steps);
        std::vector<double> log_s(n);
        for (std::size_t p = begin; p < end; ++p) {
            PathRng rng(cfg.seed, p);
            double log_z = 0.0;
            stepper.initial(log_s, log_z);
            for (std::size_t k = 0; k < cfg.n_steps; ++k) stepper.step(rng, log_s, log_z);
            out.z[p] = std::exp(log_z);
            for (std::size_t i = 0; i < n; ++i) out.prices[p * n + i] = std::exp(log_s[i]);
        }
    });
    return out;
}

std::vector<ReplicationPath> replicate(const DerivedMarket& mkt, const PolicySolution& sol,
                                       const PathConfig& cfg) {
    cfg.validate();
    const std::size_t n = mkt.n_assets();
    const std::size_t stride = cfg.n_steps / cfg.rebalance_count();
    std::vector<ReplicationPath> out(cfg.n_paths);

    parallel_for(cfg.n_paths, [&](std::size_t begin, std::size_t end) {
        Stepper stepper(mkt, cfg.n_steps);
        const double dt = stepper.dt();
        const double carry = std::exp(mkt.riskfree() * dt * static_cast<double>(stride));
        std::vector<double> log_s(n);
        std::vector<double> shares(n);
        for (std::size_t p = begin; p < end; ++p) {
            PathRng rng(cfg.seed, p);
            double log_z = 0.0;
            stepper.initial(log_s, log_z);
            double wealth = sol.spec.w0;
            double cash = 0.0;
            double min_cash = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < cfg.n_steps; ++k) {
                if (k % stride == 0) {
                    if (k > 0) {
                        wealth = cash * carry;
                        for (std::size_t i = 0; i < n; ++i) wealth += shares[i] * std::exp(log_s[i]);
                    }
                    const double t = static_cast<double>(k) * dt;
                    const double exposure = risky_exposure(mkt, sol, t, std::exp(log_z));
                    double invested = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        const double value = exposure * mkt.merton[i];
                        shares[i] = value / std::exp(log_s[i]);
                        invested += value;
                    }
                    cash = wealth - invested;
                    min_cash = std::min(min_cash, cash);
                }
                stepper.step(rng, log_s, log_z);
            }
            wealth = cash * carry;
            for (std::size_t i = 0; i < n; ++i) wealth += shares[i] * std::exp(log_s[i]);
            const double zt = std::exp(log_z);
            out[p] = {wealth, zt, terminal_wealth(zt, sol), min_cash};
        }
    });
    return out;
}

double empirical_var(std::span<const double> values, double kappa) {
    check_kappa(kappa);
    const auto losses = sorted_losses(values);
    return losses[tail_count_index(losses.size(), kappa)];
}

double cvar_minimization(std::span<const double> values, double kappa) {
    check_kappa(kappa);
    const auto losses = sorted_losses(values);
    const double var = losses[tail_count_index(losses.size(), kappa)];
    double excess = 0.0;
    for (double l : losses) excess += std::max(l - var, 0.0);
    return var + excess / ((1.0 - kappa) * static_cast<double>(losses.size()));
}

double cvar_tail_average(std::span<const double> values, double kappa) {
    check_kappa(kappa);
    const auto losses = sorted_losses(values);
    const std::size_t n = losses.size();
    const double mass = (1.0 - kappa) * static_cast<double>(n);
    double remaining = mass;
    double total = 0.0;
    for (std::size_t j = n; j-- > 0 && remaining > 0.0;) {
        const double w = std::min(1.0, remaining);
        total += w * losses[j];
        remaining -= w;
    }
    return total / mass;
}

TerminalStats terminal_stats(std::span<const double> values, double kappa,
                             std::optional<AtomLevels> atoms) {
    check_kappa(kappa);
    if (values.empty()) throw Error(ErrorKind::EmptySample, "terminal_stats on empty sample");
    TerminalStats st;
    st.count = values.size();
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    st.mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - st.mean) * (v - st.mean);
    st.std_error = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    st.var_kappa = empirical_var(values, kappa);
    st.cvar_kappa = cvar_minimization(values, kappa);
    st.dcvar_kappa = st.mean + st.cvar_kappa;

    if (atoms) {
        const std::array<double, 3> levels{atoms->zero, atoms->alpha_level, atoms->cap};
        std::array<std::size_t, 3> counts{};
        for (double v : values) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < 3; ++j)
                if (std::abs(v - levels[j]) < std::abs(v - levels[best])) best = j;
            ++counts[best];
        }
        for (std::size_t j = 0; j < 3; ++j) st.atom_freqs[j] = static_cast<double>(counts[j]) / n;
    } else {
        st.atom_freqs = {0.0, 0.0, 0.0};
    }
    return st;
}

namespace {

FrontierPoint frontier_point(const StatePriceDistribution& dist, const ProblemSpec& base,
                             const AlphaSearchConfig& cfg) {
    FrontierPoint pt;
    pt.K = base.K;
    pt.B = base.B;
    try {
        const OptimizedPolicy opt = optimize_alpha(dist, base, cfg);
        pt.feasible = true;
        pt.alpha_star = opt.solution.alpha();
        pt.expected_terminal = opt.solution.expected_terminal;
        pt.k_lower = opt.solution.bounds.k_lower;
        pt.k_upper = opt.solution.bounds.k_upper;
        pt.case_tag = opt.solution.case_tag;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoFeasibleAlpha && e.kind() != ErrorKind::InfeasibleSpec &&
            e.kind() != ErrorKind::InfeasibleK)
            throw;
        pt.feasible = false;
    }
    return pt;
}

}  // namespace

std::vector<FrontierPoint> frontier(const StatePriceDistribution& dist, double w0, double kappa,
                                    double B, std::span<const double> k_grid,
                                    const AlphaSearchConfig& cfg) {
    for (std::size_t i = 1; i < k_grid.size(); ++i)
        if (!(k_grid[i] > k_grid[i - 1]))
            throw Error(ErrorKind::DomainError, "K grid must be increasing");
    std::vector<FrontierPoint> out(k_grid.size());
    parallel_for(k_grid.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            out[i] = frontier_point(dist, ProblemSpec{w0, 0.0, kappa, B, k_grid[i]}, cfg);
    });
    return out;
}

std::vector<FrontierPoint> cap_sweep(const StatePriceDistribution& dist, double w0, double kappa,
                                     double K, std::span<const double> b_grid,
                                     const AlphaSearchConfig& cfg) {
    std::vector<FrontierPoint> out(b_grid.size());
    parallel_for(b_grid.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            out[i] = frontier_point(dist, ProblemSpec{w0, 0.0, kappa, b_grid[i], K}, cfg);
    });
    return out;
}

}  // namespace dcvar
