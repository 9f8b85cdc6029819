// Acceptance checks for the reference four-asset problem. Each criterion
// prints one PASS/FAIL line; the exit status is nonzero if any selected
// criterion fails. Usage: acceptance [criterion...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dcvar/cli.hpp"
#include "dcvar/error.hpp"
#include "dcvar/montecarlo.hpp"
#include "dcvar/oracle.hpp"
#include "dcvar/policy.hpp"
#include "fixtures.hpp"

using namespace dcvar;

namespace {

// Tolerances.
constexpr double kHeadlineExpected = 141.78;
constexpr double kHeadlineAlpha = -121.14;
constexpr double kHeadlineTol = 0.5;
constexpr double kHeadlineSeconds = 5.0;
constexpr double kP0 = 0.000772;
constexpr double kP0Tol = 1e-5;
constexpr double kPB = 0.055;
constexpr double kPBTol = 5e-4;  // "approximately 5.5%": rounds to 0.055
constexpr double kBinomialSEs = 3.0;
constexpr double kAtomsSeconds = 60.0;
constexpr double kSlope = 1.0;
constexpr double kSlopeTol = 0.02;
constexpr double kConcavityTol = 1e-9;
constexpr double kFrontierSeconds = 120.0;
constexpr double kCapSpread = 0.01;
constexpr double kOracleGap = 0.005;
constexpr std::size_t kOracleGrid = 2000;
constexpr double kQuadTol = 1e-8;
constexpr double kResidualTol = 1e-8;
constexpr double kRoundTripTol = 1e-12;
constexpr double kDeltaTol = 1e-5;
constexpr double kLimitTol = 1e-3;
constexpr double kMcSEs = 3.0;
constexpr std::size_t kPaths = 500000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) { return cli::format_number(x); }

struct Verdict {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "[x] ") + what;
    }
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string config_path() { return std::string(DCVAR_SOURCE_DIR) + "/configs/four_asset.json"; }

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double n = static_cast<double>(x.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Verdict headline() {
    Verdict v;
    const auto dir = std::filesystem::temp_directory_path() / "dcvar_acceptance_1";
    std::filesystem::create_directories(dir);
    const std::string cfg = config_path(), out = dir.string();
    const char* argv[] = {"dcvar", "solve", "--config", cfg.c_str(), "--out", out.c_str()};
    std::ostringstream sout, serr;
    const auto t0 = Clock::now();
    const int code = cli::run(6, argv, sout, serr);
    const double dt = seconds_since(t0);
    v.check(code == 0, "exit=" + std::to_string(code));
    if (code != 0) return v;
    const auto j = nlohmann::json::parse(slurp(dir / "solution.json"));
    const double e = j["expected_terminal"].get<double>();
    const double a = j["alpha_star"].get<double>();
    v.check(std::abs(e - kHeadlineExpected) <= kHeadlineTol, "E[V_T]=" + fmt(e));
    v.check(std::abs(a - kHeadlineAlpha) <= kHeadlineTol, "alpha*=" + fmt(a));
    v.check(dt <= kHeadlineSeconds, "t=" + fmt(dt) + "s");
    return v;
}

Verdict atoms() {
    Verdict v;
    const auto t0 = Clock::now();
    const DerivedMarket mkt = testing::four_asset_market();
    const LognormalStatePrice law(mkt.m0, mkt.nu0);
    const OptimizedPolicy opt = optimize_alpha(law, testing::reference_spec(0.0));
    const PolicySolution& sol = opt.solution;
    const AtomProbabilities id = atom_probabilities(sol, sol.spec.K);
    v.check(std::abs(id.p_zero - kP0) <= kP0Tol, "P0=" + fmt(id.p_zero));
    v.check(std::abs(id.p_cap - kPB) <= kPBTol, "PB=" + fmt(id.p_cap));

    const cli::RunConfig cfg = cli::load_config(config_path());
    PathConfig pc = cfg.paths;
    pc.n_paths = kPaths;
    const TerminalSample s = simulate_terminal(mkt, pc);
    std::vector<double> payoff(kPaths);
    for (std::size_t i = 0; i < kPaths; ++i) payoff[i] = terminal_wealth(s.z[i], sol);
    const TerminalStats st = terminal_stats(payoff, sol.spec.kappa, AtomLevels{0.0, -sol.alpha(), sol.spec.B});
    const double expect[3] = {id.p_zero, id.p_alpha, id.p_cap};
    const char* names[3] = {"0", "-alpha", "B"};
    for (int k = 0; k < 3; ++k) {
        const double se = std::sqrt(expect[k] * (1.0 - expect[k]) / static_cast<double>(kPaths));
        const double z = (st.atom_freqs[k] - expect[k]) / se;
        v.check(std::abs(z) <= kBinomialSEs,
                std::string("freq[") + names[k] + "]=" + fmt(st.atom_freqs[k]) + " (" + fmt(z) + " SE)");
    }
    const double dt = seconds_since(t0);
    v.check(dt <= kAtomsSeconds, "t=" + fmt(dt) + "s");
    return v;
}

Verdict frontier_shape() {
    Verdict v;
    const auto t0 = Clock::now();
    const auto law = testing::four_asset_law();
    std::vector<double> ks, es;
    for (int k = 10; k <= 30; ++k) ks.push_back(k);
    const auto pts = frontier(law, 100.0, 0.99, 500.0, ks);
    bool all = true;
    for (const auto& p : pts) {
        all = all && p.feasible;
        es.push_back(p.expected_terminal);
    }
    v.check(all, "21 points feasible");
    const double slope = lsq_slope(ks, es);
    v.check(std::abs(slope - kSlope) <= kSlopeTol, "slope=" + fmt(slope));

    std::vector<double> low;
    for (int i = 1; i <= 16; ++i) low.push_back(0.5 * i);
    const auto lp = frontier(law, 100.0, 0.99, 500.0, low);
    double worst = -1e300;
    for (std::size_t i = 1; i + 1 < lp.size(); ++i) {
        if (!lp[i - 1].feasible || !lp[i].feasible || !lp[i + 1].feasible) {
            worst = 1e300;
            break;
        }
        worst = std::max(worst, lp[i + 1].expected_terminal - 2.0 * lp[i].expected_terminal +
                                    lp[i - 1].expected_terminal);
    }
    v.check(worst <= kConcavityTol, "max second difference on K in [0.5,8]=" + fmt(worst));
    const double dt = seconds_since(t0);
    v.check(dt <= kFrontierSeconds, "t=" + fmt(dt) + "s");
    return v;
}

Verdict cap_insensitivity() {
    Verdict v;
    const auto law = testing::four_asset_law();
    const std::vector<double> caps{140.0, 200.0, 500.0, 2000.0, 10000.0};
    const auto pts = cap_sweep(law, 100.0, 0.99, 30.0, caps);
    double lo = 1e300, hi = -1e300;
    std::string values;
    for (const auto& p : pts) {
        if (!p.feasible) {
            v.check(false, "B=" + fmt(p.B) + " infeasible");
            continue;
        }
        lo = std::min(lo, p.expected_terminal);
        hi = std::max(hi, p.expected_terminal);
        values += (values.empty() ? "" : ",") + fmt(p.expected_terminal);
    }
    const double spread = (hi - lo) / hi;
    v.check(spread < kCapSpread, "E(B)={" + values + "} spread=" + fmt(100.0 * spread) + "%");
    return v;
}

Verdict oracle_equivalence() {
    Verdict v;
    const auto law = testing::four_asset_law();
    const oracle::LognormalParams params{law.m0(), law.nu0()};
    std::mt19937_64 gen(20240611);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int done = 0;
    double worst_gap = 0.0, worst_excess = -1e300;
    while (done < 10) {
        const double w0 = 60.0 + 80.0 * u(gen);
        const double kappa = 0.9 + 0.095 * u(gen);
        const double alpha = -(0.4 + 1.4 * u(gen)) * w0;
        ProblemSpec s{w0, alpha, kappa, 500.0, 0.0};
        RiskBounds rb;
        try {
            s.validate();
            rb = k_bounds(law, s);
        } catch (const Error&) {
            continue;
        }
        const double top = std::min(rb.k_upper, rb.k_lower + 4.0 * w0);
        s.K = rb.k_lower + (0.1 + 0.8 * u(gen)) * (top - rb.k_lower);
        const PolicySolution exact = solve_policy(law, s);
        ProblemSpec relaxed = s;
        relaxed.w0 = s.w0 * (1.0 + oracle::kGridBudgetSlack);
        const double ceiling = solve_policy(law, relaxed).expected_terminal;
        const auto g = oracle::grid_search_static(params, s.w0, s.alpha, s.kappa, s.B, s.K, kOracleGrid);
        const double gap = std::abs(g.expected - exact.expected_terminal) / exact.expected_terminal;
        worst_gap = std::max(worst_gap, gap);
        worst_excess = std::max(worst_excess, g.expected - ceiling);
        ++done;
    }
    v.check(worst_gap <= kOracleGap, "max relative gap=" + fmt(worst_gap));
    v.check(worst_excess <= 1e-9, "max excess over slack ceiling=" + fmt(worst_excess));
    return v;
}

Verdict invariants() {
    Verdict v;
    const DerivedMarket mkt = testing::four_asset_market();
    const LognormalStatePrice law(mkt.m0, mkt.nu0);
    const oracle::LognormalParams params{law.m0(), law.nu0()};

    double quad_err = 0.0;
    for (double ly = -20.0; ly <= 12.0; ly += 0.25)
        for (int p = 0; p < 2; ++p)
            quad_err = std::max(quad_err, std::abs(law.h(p, std::exp(ly)) - oracle::quad_H(params, p, std::exp(ly))));
    v.check(quad_err <= kQuadTol, "H vs quadrature " + fmt(quad_err));

    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    bool mono = true;
    double resid = 0.0;
    for (double alpha : {-60.0, -110.0, -121.14, -200.0, -400.0}) {
        ProblemSpec s = testing::reference_spec(alpha);
        const RiskBounds rb = k_bounds(law, s);
        for (int i = 0; i < 200; ++i) {
            double d1 = rb.delta_lower + u(gen) * (rb.delta_upper - rb.delta_lower);
            double d2 = rb.delta_lower + u(gen) * (rb.delta_upper - rb.delta_lower);
            if (d1 == d2) continue;
            if (d1 > d2) std::swap(d1, d2);
            mono = mono && risk_curve(law, s, d1) < risk_curve(law, s, d2);
            const double r1 = 1e-3 + 300.0 * u(gen);
            mono = mono && budget_value(law, s, d1, r1) <= budget_value(law, s, d2, r1) &&
                   budget_value(law, s, d1, r1) <= budget_value(law, s, d1, r1 * 1.5);
        }
        for (double f : {0.02, 0.25, 0.5, 0.75, 0.98}) {
            s.K = rb.k_lower + f * (rb.k_upper - rb.k_lower);
            const PolicySolution sol = solve_policy(law, s);
            const double a = sol.threshold_a, b = sol.threshold_b;
            resid = std::max(resid, std::abs(budget_value(law, s, a, b - a) - s.w0) / s.w0);
            resid = std::max(resid, std::abs(constraint_value(law, s, a, b) - s.K) / std::max(1.0, s.K));
        }
    }
    v.check(mono, "L and I monotone");
    v.check(resid <= kResidualTol, "residuals " + fmt(resid));

    double rt = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double kappa = 0.5 + 0.4995 * u(gen);
        const double d = 5.0 * u(gen), r = 1e-3 + 100.0 * u(gen);
        const Multipliers m = multipliers_from_thresholds(d, r, kappa, CaseTag::Interior);
        rt = std::max(rt, std::abs(m.delta * m.eta - (1.0 - m.lambda)));
        rt = std::max(rt, std::abs(m.rho * m.eta - m.lambda / (1.0 - kappa)) / std::max(1.0, m.lambda / (1.0 - kappa)));
    }
    v.check(rt <= kRoundTripTol, "round trip " + fmt(rt));

    const PolicySolution sol = solve_policy(law, testing::reference_spec());
    double fd = 0.0;
    const double h = 1e-5;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const double t = 0.05 + 0.09 * i, z = std::exp(-4.0 + 0.8 * j);
            const double num = -z * (wealth_at(mkt, sol, t, z * (1 + h)) - wealth_at(mkt, sol, t, z * (1 - h))) / (2 * h * z);
            const double ex = risky_exposure(mkt, sol, t, z);
            fd = std::max(fd, std::abs(num - ex) / std::max(std::abs(ex), 1e-6 * wealth_at(mkt, sol, t, z)));
        }
    v.check(fd <= kDeltaTol, "allocation vs finite difference " + fmt(fd));

    auto R = [&](double a) { return alpha_value(law, 100.0, 30.0, 0.99, 500.0, a); };
    double alo = 0.0, ahi = -1e300;
    for (int i = 0; i <= 20000; ++i) {
        const double a = -499.0 + 498.0 * i / 20000.0;
        if (std::isinf(R(a))) continue;
        alo = std::min(alo, a);
        ahi = std::max(ahi, a);
    }
    int triples = 0;
    double worst_convex = -1e300;
    std::uniform_real_distribution<double> ua(alo, ahi);
    for (int attempt = 0; attempt < 10000 && triples < 100; ++attempt) {
        const double a = ua(gen), b = ua(gen);
        const double ra = R(a), rb = R(b);
        if (std::isinf(ra) || std::isinf(rb) || a == b) continue;
        worst_convex = std::max(worst_convex, -R(0.5 * (a + b)) + 0.5 * (ra + rb));
        ++triples;
    }
    v.check(triples == 100 && worst_convex <= 1e-9,
            std::to_string(triples) + " triples on [" + fmt(alo) + "," + fmt(ahi) + "], -R midpoint excess " + fmt(worst_convex));

    const double w = wealth_at(mkt, sol, 0.0, 1.0);
    v.check(std::abs(w - 100.0) <= 1e-8 * 100.0, "wealth_at(0,1)=" + fmt(w));

    for (double alpha : {-121.14, -60.0}) {
        ProblemSpec s{100.0, alpha, 0.99, 1e6, 30.0};
        const RiskBounds rb = k_bounds(law, s);
        const AsymptoticBounds lim = asymptotic_k_bounds(law, 100.0, alpha, 0.99);
        const double el = testing::rel_diff(rb.k_lower, lim.k_lower);
        const double eu = std::abs(rb.k_upper - lim.k_upper) / std::abs(lim.k_upper);
        v.check(el <= kLimitTol, "alpha=" + fmt(alpha) + " k_lower(1e6)=" + fmt(rb.k_lower) + " vs " + fmt(lim.k_lower));
        v.check(eu <= kLimitTol, "alpha=" + fmt(alpha) + " k_upper(1e6)=" + fmt(rb.k_upper) + " vs " + fmt(lim.k_upper));
    }
    return v;
}

Verdict replication() {
    Verdict v;
    const DerivedMarket mkt = testing::four_asset_market();
    const LognormalStatePrice law(mkt.m0, mkt.nu0);
    const PolicySolution sol = optimize_alpha(law, testing::reference_spec(0.0)).solution;
    const cli::RunConfig cfg = cli::load_config(config_path());

    PathConfig pc = cfg.paths;
    pc.n_paths = kPaths;
    const auto rep = replicate(mkt, sol, pc);
    double sum = 0.0, sum2 = 0.0;
    for (const auto& r : rep) {
        const double x = r.z_terminal * r.replicated;
        sum += x;
        sum2 += x * x;
    }
    const double n = static_cast<double>(rep.size());
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1.0));
    v.check(std::abs(mean - sol.spec.w0) <= kMcSEs * se,
            "deflated mean=" + fmt(mean) + " +- " + fmt(se));

    const double la = std::log(sol.threshold_a), lb = std::log(sol.threshold_b);
    std::vector<double> medians;
    std::string shown;
    for (std::size_t count : {250u, 500u, 1000u}) {
        const auto r = replicate(mkt, sol, PathConfig{20000, 1000, cfg.paths.seed, count});
        std::vector<double> far;
        for (const auto& x : r) {
            const double lz = std::log(x.z_terminal);
            if (std::abs(lz - la) > 0.2 && std::abs(lz - lb) > 0.2)
                far.push_back(std::abs(x.replicated - x.payoff) / sol.spec.B);
        }
        std::nth_element(far.begin(), far.begin() + far.size() / 2, far.end());
        medians.push_back(far[far.size() / 2]);
        shown += (shown.empty() ? "" : ",") + fmt(medians.back());
    }
    v.check(medians[1] < medians[0] && medians[2] < medians[1], "median far hedge error {" + shown + "}");
    return v;
}

struct Criterion {
    int id;
    const char* name;
    Verdict (*run)();
};

}  // namespace

int main(int argc, char** argv) {
    const Criterion all[] = {
        {1, "headline optimum", headline},
        {2, "atom probabilities", atoms},
        {3, "frontier slope and concavity", frontier_shape},
        {4, "cap insensitivity", cap_insensitivity},
        {5, "oracle equivalence", oracle_equivalence},
        {6, "analytical invariants", invariants},
        {7, "replication", replication},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    bool ok = true;
    for (const auto& c : all) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.check(false, std::string("exception: ") + e.what());
        }
        std::printf("%s  criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
        std::fflush(stdout);
        ok = ok && v.pass;
    }
    return ok ? 0 : 1;
}
