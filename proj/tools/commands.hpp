#pragma once

// Subcommands of the semrd tool. Each returns the process exit code:
// 0 success, 1 parse or validation error, 2 infeasible budget (or a model
// the command cannot handle, e.g. not diagonalizable), 3 solver failure.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace semrd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitSolver = 3;

struct Globals {
    bool bits = false;
    std::optional<double> tol;
    std::uint64_t seed = 1;
    bool json = false;
};

struct SolveArgs {
    std::string model;
    std::vector<double> D_s;  ///< one per intrinsic state
    std::optional<double> D_o;
    std::string solver = "auto";
    bool emit_delta = false;
    /// Weighted mode: w_s E[d_s] + w_o E[d_o] <= D_bar.
    std::vector<double> weights;
    std::optional<double> D_bar;
};

struct SweepArgs {
    std::string model;
    std::vector<double> ds_range;  ///< min, max, steps
    std::vector<double> do_range;
    std::string solver = "auto";
    std::string out;  ///< empty for standard output
};

struct CurvesArgs {
    std::string model;
    int n_points = 200;
    std::string out;
};

struct WaterlevelsArgs {
    std::string model;
    std::string points;
    std::string out;
};

struct DiscreteArgs {
    std::string model;
    std::vector<double> D_s;
    std::optional<double> D_o;
    int oracle_steps = 0;  ///< 0 skips the brute-force comparison
    bool emit_conditional = false;
};

struct VerifyArgs {
    std::string model;
    double D_s = 0.0;
    double D_o = 0.0;
    std::size_t samples = 1000000;
};

struct GenArgs {
    std::string which;  ///< toy, circulant, circulant-dense, sparse, binary
    std::string out;
};

int run_solve(const Globals& g, const SolveArgs& a, std::ostream& out, std::ostream& err);
int run_sweep(const Globals& g, const SweepArgs& a, std::ostream& out, std::ostream& err);
int run_curves(const Globals& g, const CurvesArgs& a, std::ostream& out, std::ostream& err);
int run_waterlevels(const Globals& g, const WaterlevelsArgs& a, std::ostream& out, std::ostream& err);
int run_discrete(const Globals& g, const DiscreteArgs& a, std::ostream& out, std::ostream& err);
int run_verify(const Globals& g, const VerifyArgs& a, std::ostream& out, std::ostream& err);
int run_gen(const Globals& g, const GenArgs& a, std::ostream& out, std::ostream& err);

/// Builds the command-line parser and dispatches; used by main and tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace semrd::cli
