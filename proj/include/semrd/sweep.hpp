#pragma once

// Rate surfaces over a (D_s, D_o) grid.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "semrd/io.hpp"
#include "semrd/waterfill.hpp"

namespace semrd {

enum class SolverKind { Auto, Gaussian, Waterfill, Discrete };

/// "auto", "gaussian", "waterfill" or "discrete"; throws InvalidArgument.
[[nodiscard]] SolverKind parse_solver_kind(const std::string& name);
[[nodiscard]] std::string_view to_string(SolverKind kind) noexcept;

struct SweepSpec {
    double ds_min = 0.0;
    double ds_max = 1.0;
    int ds_steps = 2;
    double do_min = 0.0;
    double do_max = 1.0;
    int do_steps = 2;
    SolverKind solver = SolverKind::Auto;
};

/// steps >= 2 and min < max on both axes; throws InvalidArgument.
void validate_sweep_spec(const SweepSpec& spec);

[[nodiscard]] std::vector<double> linspace(double lo, double hi, int steps);

struct SweepCell {
    double D_s = 0.0;
    double D_o = 0.0;
    double rate = 0.0;       ///< nats; inf when infeasible, nan on failure
    std::string region;      ///< A0..A3, "none" when infeasible, "fail"
    long iterations = 0;
};

struct SweepResult {
    std::vector<SweepCell> cells;  ///< D_s outer, D_o inner
    SolverKind solver = SolverKind::Auto;  ///< the solver actually used
    bool any_failed = false;
};

/// Spectral form of a Gaussian model: the circulant rows when given,
/// otherwise the simultaneous diagonalization.
[[nodiscard]] std::optional<SpectralModel> spectral_of(const LoadedModel& model);

/// Resolves `auto` and checks that the requested solver fits the model.
/// Throws NotDiagonalizable or InvalidArgument.
[[nodiscard]] SolverKind resolve_solver(const LoadedModel& model, SolverKind requested);

/// Cells are independent and solved in parallel; the output order is fixed.
[[nodiscard]] SweepResult run_sweep(const LoadedModel& model, const SweepSpec& spec, unsigned workers = 0);

/// Writes "# rate unit: ..." then "D_s,D_o,rate,region" and one row per
/// cell with 12 significant digits.
void write_sweep_csv(std::ostream& out, const SweepResult& result, bool bits);

}  // namespace semrd
