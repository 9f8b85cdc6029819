#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dcvar/market_model.hpp"
#include "dcvar/montecarlo.hpp"
#include "dcvar/policy.hpp"

namespace dcvar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInfeasible = 2;

struct ProblemConfig {
    double w0 = 100.0;
    double K = 30.0;
    double kappa = 0.99;
    double B = 500.0;
};

struct RunConfig {
    MarketParams market;
    ProblemConfig problem;
    AlphaSearchConfig alpha_search;
    PathConfig paths;
    std::filesystem::path output_dir = ".";
};

/// Parses the JSON config document. Throws Error(InvalidConfig) on schema
/// violations and re-checks market and problem invariants.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

struct Overrides {
    std::optional<double> K;
    std::optional<double> B;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> output_dir;
};

void apply_overrides(RunConfig& cfg, const Overrides& ov);

struct FrontierOptions {
    double k_min = 0.0;
    double k_max = 0.0;
    std::size_t n_points = 0;
    bool sweep_cap = false;     ///< sweep B at fixed K instead of K
    std::vector<double> cap_values;
};

struct SimulateOptions {
    std::vector<std::size_t> emit_paths;  ///< path indices written to paths.csv (at most 16)
    bool replicate = false;
};

/// Each command writes its files under cfg.output_dir, prints a summary to
/// `out` and diagnostics to `err`, and returns an exit code.
int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bounds(const RunConfig& cfg, double alpha, std::ostream& out, std::ostream& err);
int cmd_frontier(const RunConfig& cfg, const FrontierOptions& opt, std::ostream& out,
                 std::ostream& err);
int cmd_simulate(const RunConfig& cfg, const SimulateOptions& opt, std::ostream& out,
                 std::ostream& err);

/// Formats with 12 significant digits.
std::string format_number(double x);

/// argv entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dcvar::cli
