#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace semrd {

enum class Errc {
    NonSymmetric,
    NotPositiveDefinite,
    NotPsd,
    DimensionMismatch,
    JointCovarianceNotPsd,
    InvalidPmf,
    ZeroProbabilitySymbol,
    InvalidDistortion,
    InvalidArgument,
    Parse,
    Infeasible,
    InfeasibleBudget,
    MaxIterationsExceeded,
    NewtonFailure,
    RootFindingFailure,
    TooLarge,
    NonPositiveSigma,
    DeltaOutOfRange,
    NotDiagonalizable,
};

[[nodiscard]] std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

    /// True for the budget/feasibility family (CLI exit code 2).
    [[nodiscard]] bool is_infeasible() const noexcept {
        return code_ == Errc::Infeasible || code_ == Errc::InfeasibleBudget;
    }
    /// True for numerical non-convergence (CLI exit code 3).
    [[nodiscard]] bool is_solver_failure() const noexcept {
        return code_ == Errc::MaxIterationsExceeded || code_ == Errc::NewtonFailure ||
               code_ == Errc::RootFindingFailure;
    }

private:
    Errc code_;
};

/// Discrete budgets below the smallest achievable distortions. Carries the
/// per-constraint minima so callers can report them.
class InfeasibleDistortion : public Error {
public:
    InfeasibleDistortion(const std::string& what, std::vector<double> minimal)
        : Error(Errc::Infeasible, what), minimal_(std::move(minimal)) {}

    [[nodiscard]] const std::vector<double>& minimal_distortions() const noexcept { return minimal_; }

private:
    std::vector<double> minimal_;
};

}  // namespace semrd
