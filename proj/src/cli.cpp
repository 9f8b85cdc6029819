#include "dcvar/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "dcvar/error.hpp"
#include "dcvar/gaussian_kit.hpp"

namespace dcvar::cli {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); }

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
            config_error("unknown key '" + it.key() + "' in " + where);
    }
}

double number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) config_error("missing '" + std::string(key) + "' in " + where);
    const json& v = obj.at(key);
    if (!v.is_number()) config_error("'" + std::string(key) + "' in " + where + " must be a number");
    return v.get<double>();
}

std::vector<double> vector_of(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) config_error("missing '" + std::string(key) + "' in " + where);
    const json& v = obj.at(key);
    if (!v.is_array()) config_error("'" + std::string(key) + "' in " + where + " must be an array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) config_error("non-numeric entry in '" + std::string(key) + "'");
        out.push_back(x.get<double>());
    }
    return out;
}

MarketParams parse_market(const json& m) {
    if (!m.is_object()) config_error("'market' must be an object");
    reject_unknown(m, {"T", "r", "S0", "mu", "vol", "corr"}, "market");
    MarketParams p;
    p.horizon = number(m, "T", "market");
    p.riskfree = number(m, "r", "market");
    p.mu = vector_of(m, "mu", "market");
    p.vol = vector_of(m, "vol", "market");
    const std::size_t n = p.mu.size();
    if (!m.contains("S0")) config_error("missing 'S0' in market");
    if (m.at("S0").is_number()) p.s0.assign(n, m.at("S0").get<double>());
    else p.s0 = vector_of(m, "S0", "market");
    if (!m.contains("corr") || !m.at("corr").is_array()) config_error("'corr' must be a matrix");
    const json& c = m.at("corr");
    if (c.size() != n) throw Error(ErrorKind::DimensionMismatch, "corr has wrong number of rows");
    p.corr = Matrix(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!c[i].is_array() || c[i].size() != n)
            throw Error(ErrorKind::DimensionMismatch, "corr row " + std::to_string(i));
        for (std::size_t j = 0; j < n; ++j) {
            if (!c[i][j].is_number()) config_error("non-numeric correlation entry");
            p.corr(i, j) = c[i][j].get<double>();
        }
    }
    return p;
}

json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return std::strtod(format_number(x).c_str(), nullptr);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << content;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InfeasibleSpec:
        case ErrorKind::InfeasibleK:
        case ErrorKind::InfeasibleDelta:
        case ErrorKind::NoFeasibleAlpha:
            return kExitInfeasible;
        default:
            return kExitIo;
    }
}

ProblemSpec base_spec(const RunConfig& cfg) {
    return ProblemSpec{cfg.problem.w0, 0.0, cfg.problem.kappa, cfg.problem.B, cfg.problem.K};
}

LognormalStatePrice distribution_of(const DerivedMarket& mkt) {
    return LognormalStatePrice(mkt.m0, mkt.nu0);
}

// Range of K reachable over the pre-scan alpha grid, for diagnostics.
std::string scanned_k_interval(const StatePriceDistribution& dist, const ProblemSpec& base) {
    double lo = kInf;
    double hi = -kInf;
    for (double a : alpha_scan_grid(base, dist.expected_z())) {
        ProblemSpec s = base;
        s.alpha = a;
        try {
            const RiskBounds rb = k_bounds(dist, s);
            lo = std::min(lo, rb.k_lower);
            hi = std::max(hi, rb.k_upper);
        } catch (const Error&) {
        }
    }
    if (lo > hi) return "none (no admissible alpha)";
    return "[" + format_number(lo) + ", " + format_number(hi) + "]";
}

template <typename Fn>
int guarded(std::ostream& err, const RunConfig& cfg, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        if (e.kind() == ErrorKind::NoFeasibleAlpha) {
            try {
                const DerivedMarket mkt = build_market(cfg.market);
                err << "feasible K interval over the scanned alpha grid: "
                    << scanned_k_interval(distribution_of(mkt), base_spec(cfg)) << "\n";
            } catch (const Error&) {
            }
        }
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
}

json solution_json(const StatePriceDistribution& dist, const OptimizedPolicy& opt) {
    const PolicySolution& sol = opt.solution;
    const AtomProbabilities from_law = atom_probabilities(dist, sol);
    const AtomProbabilities from_identity = atom_probabilities(sol, sol.spec.K);
    json j;
    j["w0"] = num(sol.spec.w0);
    j["K"] = num(sol.spec.K);
    j["kappa"] = num(sol.spec.kappa);
    j["B"] = num(sol.spec.B);
    j["alpha_star"] = num(sol.alpha());
    j["lambda"] = num(sol.multipliers.lambda);
    j["eta"] = num(sol.multipliers.eta);
    j["delta"] = num(sol.multipliers.delta);
    j["rho"] = num(sol.multipliers.rho);
    j["threshold_a"] = num(sol.threshold_a);
    j["threshold_b"] = num(sol.threshold_b);
    j["expected_terminal"] = num(sol.expected_terminal);
    j["k_lower"] = num(sol.bounds.k_lower);
    j["k_upper"] = num(sol.bounds.k_upper);
    j["case_tag"] = std::string(to_string(sol.case_tag));
    j["atoms"] = {{"p_zero", num(from_law.p_zero)},
                  {"p_cap", num(from_law.p_cap)},
                  {"p_alpha", num(from_law.p_alpha)}};
    j["atoms_identity"] = {{"p_zero", num(from_identity.p_zero)},
                           {"p_cap", num(from_identity.p_cap)},
                           {"p_alpha", num(from_identity.p_alpha)}};
    j["search"] = {{"iterations", opt.iterations},
                   {"slope", num(opt.slope)},
                   {"on_boundary", opt.on_boundary}};
    return j;
}

std::vector<std::size_t> parse_index_list(const std::vector<std::string>& raw) {
    std::vector<std::size_t> out;
    for (const auto& tok : raw) {
        std::stringstream ss(tok);
        std::string piece;
        while (std::getline(ss, piece, ',')) {
            if (piece.empty()) continue;
            out.push_back(static_cast<std::size_t>(std::stoull(piece)));
        }
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double std_error_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double n = static_cast<double>(v.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

std::string path_rows(const DerivedMarket& mkt, const PolicySolution& sol, const PathConfig& pc,
                      std::size_t index) {
    const Path path = simulate_path(mkt, pc, index);
    const std::size_t n = mkt.n_assets();
    const std::size_t stride = pc.n_steps / pc.rebalance_count();
    std::string rows;
    std::vector<double> shares(n, 0.0);
    double cash = 0.0;
    double rebalanced_at = 0.0;
    for (std::size_t k = 0; k <= pc.n_steps; ++k) {
        const double t = path.times[k];
        const auto prices = path.prices_at(k, n);
        const double z = path.state_price[k];
        double replicated = sol.spec.w0;
        if (k > 0) {
            replicated = cash * std::exp(mkt.riskfree() * (t - rebalanced_at));
            for (std::size_t i = 0; i < n; ++i) replicated += shares[i] * prices[i];
        }
        std::string line = std::to_string(index) + "," + std::to_string(k) + "," + format_number(t);
        for (double s : prices) line += "," + format_number(s);
        line += "," + format_number(z);
        if (k < pc.n_steps) {
            const AllocationState st = allocation_at(mkt, sol, t, z, prices);
            line += "," + format_number(st.wealth) + "," + format_number(replicated);
            for (double v : st.risky_value) line += "," + format_number(v);
            line += "," + format_number(st.cash);
            if (k % stride == 0) {
                double invested = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    shares[i] = st.shares[i];
                    invested += st.risky_value[i];
                }
                cash = replicated - invested;
                rebalanced_at = t;
            }
        } else {
            line += "," + format_number(terminal_wealth(z, sol)) + "," + format_number(replicated);
            for (std::size_t i = 0; i <= n; ++i) line += ",";
        }
        rows += line + "\n";
    }
    return rows;
}

}  // namespace

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        config_error(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) config_error("config must be a JSON object");
    reject_unknown(doc, {"market", "problem", "alpha_search", "paths", "output_dir"}, "config");

    RunConfig cfg;
    if (!doc.contains("market")) config_error("missing 'market'");
    cfg.market = parse_market(doc.at("market"));

    if (!doc.contains("problem") || !doc.at("problem").is_object()) config_error("missing 'problem'");
    const json& pr = doc.at("problem");
    reject_unknown(pr, {"w0", "K", "kappa", "B"}, "problem");
    cfg.problem.w0 = number(pr, "w0", "problem");
    cfg.problem.K = number(pr, "K", "problem");
    cfg.problem.kappa = number(pr, "kappa", "problem");
    cfg.problem.B = number(pr, "B", "problem");

    if (doc.contains("alpha_search")) {
        const json& as = doc.at("alpha_search");
        if (!as.is_object()) config_error("'alpha_search' must be an object");
        reject_unknown(as, {"alpha0", "zeta", "step_scale", "eps", "max_iters"}, "alpha_search");
        if (as.contains("alpha0") && !as.at("alpha0").is_null())
            cfg.alpha_search.alpha0 = number(as, "alpha0", "alpha_search");
        if (as.contains("zeta")) cfg.alpha_search.zeta = number(as, "zeta", "alpha_search");
        if (as.contains("step_scale"))
            cfg.alpha_search.step_scale = number(as, "step_scale", "alpha_search");
        if (as.contains("eps")) cfg.alpha_search.eps = number(as, "eps", "alpha_search");
        if (as.contains("max_iters"))
            cfg.alpha_search.max_iters = static_cast<int>(number(as, "max_iters", "alpha_search"));
    }
    if (doc.contains("paths")) {
        const json& ps = doc.at("paths");
        if (!ps.is_object()) config_error("'paths' must be an object");
        reject_unknown(ps, {"n_paths", "n_steps", "seed", "rebalance_steps"}, "paths");
        auto count = [&](const char* key) {
            const json& v = ps.at(key);
            if (!v.is_number_unsigned()) config_error(std::string("'") + key + "' must be a non-negative integer");
            return v.get<std::uint64_t>();
        };
        if (ps.contains("n_paths")) cfg.paths.n_paths = count("n_paths");
        if (ps.contains("n_steps")) cfg.paths.n_steps = count("n_steps");
        if (ps.contains("seed")) cfg.paths.seed = count("seed");
        if (ps.contains("rebalance_steps")) cfg.paths.rebalance_steps = count("rebalance_steps");
    }
    if (doc.contains("output_dir")) {
        if (!doc.at("output_dir").is_string()) config_error("'output_dir' must be a string");
        cfg.output_dir = doc.at("output_dir").get<std::string>();
    }

    // Module invariants re-checked at load time.
    build_market(cfg.market);
    cfg.alpha_search.validate();
    cfg.paths.validate();
    if (!(cfg.problem.w0 > 0.0)) config_error("w0 must be positive");
    if (!(cfg.problem.kappa > 0.5 && cfg.problem.kappa < 1.0)) config_error("kappa must lie in (0.5, 1)");
    if (!(cfg.problem.B > 0.0)) config_error("B must be positive");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read config " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

void apply_overrides(RunConfig& cfg, const Overrides& ov) {
    if (ov.K) cfg.problem.K = *ov.K;
    if (ov.B) cfg.problem.B = *ov.B;
    if (ov.seed) cfg.paths.seed = *ov.seed;
    if (ov.output_dir) cfg.output_dir = *ov.output_dir;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, cfg, [&] {
        const DerivedMarket mkt = build_market(cfg.market);
        const LognormalStatePrice dist = distribution_of(mkt);
        const OptimizedPolicy opt = optimize_alpha(dist, base_spec(cfg), cfg.alpha_search);
        write_file(cfg.output_dir / "solution.json", solution_json(dist, opt).dump(2) + "\n");
        const PolicySolution& sol = opt.solution;
        out << "alpha*=" << format_number(sol.alpha())
            << " E[V_T]=" << format_number(sol.expected_terminal)
            << " lambda=" << format_number(sol.multipliers.lambda)
            << " eta=" << format_number(sol.multipliers.eta)
            << " case=" << to_string(sol.case_tag) << "\n";
        return kExitOk;
    });
}

int cmd_bounds(const RunConfig& cfg, double alpha, std::ostream& out, std::ostream& err) {
    return guarded(err, cfg, [&] {
        const DerivedMarket mkt = build_market(cfg.market);
        const LognormalStatePrice dist = distribution_of(mkt);
        ProblemSpec spec = base_spec(cfg);
        spec.alpha = alpha;
        const RiskBounds rb = k_bounds(dist, spec);
        const RiskBounds cf = k_bounds_closed_form(dist, spec);
        const AsymptoticBounds asym = asymptotic_k_bounds(dist, spec.w0, alpha, spec.kappa);
        json j;
        j["alpha"] = num(alpha);
        j["k_lower"] = num(rb.k_lower);
        j["k_upper"] = num(rb.k_upper);
        j["delta_lower"] = num(rb.delta_lower);
        j["delta_upper"] = num(rb.delta_upper);
        j["closed_form"] = {{"k_lower", num(cf.k_lower)}, {"k_upper", num(cf.k_upper)}};
        j["large_cap_limit"] = {{"k_lower", num(asym.k_lower)}, {"k_upper", num(asym.k_upper)}};
        j["K_feasible"] = alpha_feasible(dist, spec);
        write_file(cfg.output_dir / "bounds.json", j.dump(2) + "\n");
        out << "alpha=" << format_number(alpha) << " k_lower=" << format_number(rb.k_lower)
            << " k_upper=" << format_number(rb.k_upper) << "\n";
        return kExitOk;
    });
}

int cmd_frontier(const RunConfig& cfg, const FrontierOptions& opt, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, cfg, [&] {
        const DerivedMarket mkt = build_market(cfg.market);
        const LognormalStatePrice dist = distribution_of(mkt);
        std::vector<FrontierPoint> points;
        std::string csv;
        if (opt.sweep_cap) {
            std::vector<double> caps = opt.cap_values;
            if (caps.empty()) caps = {140.0, 200.0, 500.0, 2000.0, 10000.0};
            points = cap_sweep(dist, cfg.problem.w0, cfg.problem.kappa, cfg.problem.K, caps,
                               cfg.alpha_search);
            csv = "B,alpha_star,expected_terminal,k_lower,k_upper,case_tag\n";
        } else {
            if (opt.n_points == 0) throw Error(ErrorKind::InvalidConfig, "n_points must be >= 1");
            if (opt.n_points > 1 && !(opt.k_min < opt.k_max))
                throw Error(ErrorKind::InvalidConfig, "k_min must be below k_max");
            std::vector<double> grid(opt.n_points);
            for (std::size_t i = 0; i < opt.n_points; ++i)
                grid[i] = opt.n_points == 1
                              ? opt.k_min
                              : opt.k_min + (opt.k_max - opt.k_min) * static_cast<double>(i) /
                                                static_cast<double>(opt.n_points - 1);
            points = frontier(dist, cfg.problem.w0, cfg.problem.kappa, cfg.problem.B, grid,
                              cfg.alpha_search);
            csv = "K,alpha_star,expected_terminal,k_lower,k_upper,case_tag\n";
        }
        std::size_t feasible = 0;
        for (const auto& p : points) {
            csv += format_number(opt.sweep_cap ? p.B : p.K);
            if (p.feasible) {
                ++feasible;
                csv += "," + format_number(p.alpha_star) + "," + format_number(p.expected_terminal) +
                       "," + format_number(p.k_lower) + "," + format_number(p.k_upper) + "," +
                       std::string(to_string(p.case_tag));
            } else {
                csv += ",,,,,";
            }
            csv += "\n";
        }
        const char* name = opt.sweep_cap ? "frontier_B.csv" : "frontier.csv";
        write_file(cfg.output_dir / name, csv);
        out << "wrote " << points.size() << " rows (" << feasible << " feasible) to "
            << (cfg.output_dir / name).string() << "\n";
        if (feasible == 0) {
            err << "error: no feasible point in the sweep\n";
            return kExitInfeasible;
        }
        return kExitOk;
    });
}

int cmd_simulate(const RunConfig& cfg, const SimulateOptions& opt, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, cfg, [&] {
        if (opt.emit_paths.size() > 16)
            throw Error(ErrorKind::InvalidConfig, "at most 16 paths can be emitted");
        const DerivedMarket mkt = build_market(cfg.market);
        const LognormalStatePrice dist = distribution_of(mkt);
        const OptimizedPolicy solved = optimize_alpha(dist, base_spec(cfg), cfg.alpha_search);
        const PolicySolution& sol = solved.solution;
        const PathConfig& pc = cfg.paths;

        const TerminalSample sample = simulate_terminal(mkt, pc);
        const std::size_t n = mkt.n_assets();
        std::vector<double> payoff(pc.n_paths), deflated(pc.n_paths);
        for (std::size_t p = 0; p < pc.n_paths; ++p) {
            payoff[p] = terminal_wealth(sample.z[p], sol);
            deflated[p] = sample.z[p] * payoff[p];
        }
        const TerminalStats st =
            terminal_stats(payoff, sol.spec.kappa, AtomLevels{0.0, -sol.alpha(), sol.spec.B});
        const double mean_z = mean_of(sample.z);
        const double mean_deflated = mean_of(deflated);
        json asset_checks = json::array();
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> zs(pc.n_paths);
            for (std::size_t p = 0; p < pc.n_paths; ++p)
                zs[p] = sample.z[p] * sample.prices[p * n + i] / cfg.market.s0[i];
            const double m = mean_of(zs);
            asset_checks.push_back({{"mean_z_s_over_s0", num(m)}, {"std_error", num(std_error_of(zs, m))}});
        }

        const AtomProbabilities law = atom_probabilities(dist, sol);
        json j;
        j["n_paths"] = pc.n_paths;
        j["n_steps"] = pc.n_steps;
        j["seed"] = pc.seed;
        j["alpha_star"] = num(sol.alpha());
        j["terminal"] = {{"mean", num(st.mean)},
                         {"var_kappa", num(st.var_kappa)},
                         {"cvar_kappa", num(st.cvar_kappa)},
                         {"dcvar_kappa", num(st.dcvar_kappa)},
                         {"std_error", num(st.std_error)},
                         {"atom_freqs",
                          {{"zero", num(st.atom_freqs[0])},
                           {"alpha", num(st.atom_freqs[1])},
                           {"cap", num(st.atom_freqs[2])}}}};
        j["closed_form"] = {{"expected_terminal", num(sol.expected_terminal)},
                            {"K", num(sol.spec.K)},
                            {"p_zero", num(law.p_zero)},
                            {"p_cap", num(law.p_cap)},
                            {"p_alpha", num(law.p_alpha)}};
        j["martingale"] = {{"mean_z", num(mean_z)},
                           {"mean_z_std_error", num(std_error_of(sample.z, mean_z))},
                           {"expected_z", num(mkt.expected_z)},
                           {"mean_z_payoff", num(mean_deflated)},
                           {"mean_z_payoff_std_error", num(std_error_of(deflated, mean_deflated))},
                           {"w0", num(sol.spec.w0)},
                           {"assets", asset_checks}};

        if (opt.replicate) {
            const auto rep = replicate(mkt, sol, pc);
            std::vector<double> zv(rep.size()), err_all(rep.size()), err_far;
            double worst_cash = 0.0;
            for (std::size_t p = 0; p < rep.size(); ++p) {
                zv[p] = rep[p].z_terminal * rep[p].replicated;
                err_all[p] = std::abs(rep[p].replicated - rep[p].payoff) / sol.spec.B;
                worst_cash = std::min(worst_cash, rep[p].min_cash);
                const double lz = std::log(rep[p].z_terminal);
                const bool far_a = sol.threshold_a <= 0.0 || std::abs(lz - std::log(sol.threshold_a)) > 0.2;
                const bool far_b = !std::isfinite(sol.threshold_b) || std::abs(lz - std::log(sol.threshold_b)) > 0.2;
                if (far_a && far_b) err_far.push_back(err_all[p]);
            }
            const double m = mean_of(zv);
            j["replication"] = {{"rebalance_steps", pc.rebalance_count()},
                                {"mean_z_replicated", num(m)},
                                {"std_error", num(std_error_of(zv, m))},
                                {"median_hedge_error", num(median_of(err_all))},
                                {"median_hedge_error_far", num(median_of(err_far))},
                                {"far_paths", err_far.size()},
                                {"max_short_cash_over_w0", num(-worst_cash / sol.spec.w0)}};
        }
        write_file(cfg.output_dir / "stats.json", j.dump(2) + "\n");

        if (!opt.emit_paths.empty()) {
            std::string csv = "path,step,t";
            for (std::size_t i = 0; i < n; ++i) csv += ",S_" + std::to_string(i + 1);
            csv += ",Z,V,V_replicated";
            for (std::size_t i = 0; i < n; ++i) csv += ",risky_" + std::to_string(i + 1);
            csv += ",cash\n";
            for (std::size_t idx : opt.emit_paths) csv += path_rows(mkt, sol, pc, idx);
            write_file(cfg.output_dir / "paths.csv", csv);
        }
        out << "paths=" << pc.n_paths << " mean=" << format_number(st.mean)
            << " VaR=" << format_number(st.var_kappa) << " DCVaR=" << format_number(st.dcvar_kappa)
            << " atoms(0,-alpha,B)=(" << format_number(st.atom_freqs[0]) << ","
            << format_number(st.atom_freqs[1]) << "," << format_number(st.atom_freqs[2]) << ")\n";
        return kExitOk;
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal dynamic portfolio under a Deviation-CVaR constraint"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<double> k_override, b_override;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_dir;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "JSON config file")->required();
        sub->add_option("--K", k_override, "override problem.K");
        sub->add_option("--B", b_override, "override problem.B");
        sub->add_option("--seed", seed_override, "override paths.seed");
        sub->add_option("-o,--out", out_dir, "override output_dir");
    };

    auto* solve = app.add_subcommand("solve", "optimize alpha and write solution.json");
    add_common(solve);

    double alpha = 0.0;
    auto* bounds = app.add_subcommand("bounds", "feasible K interval for one alpha (bounds.json)");
    add_common(bounds);
    bounds->add_option("--alpha", alpha, "auxiliary level alpha (< 0)")->required();

    FrontierOptions fopt;
    auto* front = app.add_subcommand("frontier", "sweep K (or B) and write frontier.csv");
    add_common(front);
    front->add_option("--k-min", fopt.k_min, "smallest K");
    front->add_option("--k-max", fopt.k_max, "largest K");
    front->add_option("--n-points", fopt.n_points, "number of K values");
    front->add_flag("--sweep-B", fopt.sweep_cap, "sweep the cap B at fixed K instead");
    front->add_option("--B-values", fopt.cap_values, "caps for --sweep-B")->delimiter(',');

    SimulateOptions sopt;
    std::vector<std::string> emit_raw;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo statistics (stats.json, paths.csv)");
    add_common(sim);
    sim->add_option("--emit-paths", emit_raw, "comma-separated path indices for paths.csv");
    sim->add_flag("--replicate", sopt.replicate, "also run the discrete replication");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }

    RunConfig cfg;
    try {
        cfg = load_config(config_path);
        Overrides ov;
        ov.K = k_override;
        ov.B = b_override;
        ov.seed = seed_override;
        if (out_dir) ov.output_dir = *out_dir;
        apply_overrides(cfg, ov);
        sopt.emit_paths = parse_index_list(emit_raw);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }

    if (solve->parsed()) return cmd_solve(cfg, out, err);
    if (bounds->parsed()) return cmd_bounds(cfg, alpha, out, err);
    if (front->parsed()) {
        if (!fopt.sweep_cap && fopt.n_points == 0) {
            err << "error: frontier needs --k-min, --k-max and --n-points (or --sweep-B)\n";
            return kExitIo;
        }
        return cmd_frontier(cfg, fopt, out, err);
    }
    return cmd_simulate(cfg, sopt, out, err);
}

}  // namespace dcvar::cli
