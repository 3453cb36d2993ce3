#pragma once

// Gaussian semantic rate-distortion function. For X ~ N(0, K_X) and
// S = H X + Z the rate is
//
//   R_G(D_s, D_o) = 1/2 logdet K_X - 1/2 max logdet Delta
//     s.t. O < Delta <= K_X, tr(H Delta H^T) <= D_s - tr K_Z, tr Delta <= D_o,
//
// a maxdet program. It is solved with a log-barrier interior-point method on
// the symmetric matrix variable. Rates are in nats.
//
// Multiplier convention: the Lagrangian is built on -logdet Delta (twice the
// rate), so stationarity reads
//   -Delta^{-1} + lambda I + mu H^T H + Psi = 0
// with Psi the dual of Delta <= K_X. This is the same scaling as the
// water-filling conditions -1/delta_j + lambda + mu alpha_j + nu_j = 0.

#include <string_view>
#include <vector>

#include "semrd/discrete.hpp"
#include "semrd/model.hpp"

namespace semrd {

enum class Region { A0, A1, A2, A3 };

[[nodiscard]] std::string_view to_string(Region region) noexcept;

/// Table I: which trace constraints are active.
[[nodiscard]] Region region_from_activity(bool state_active, bool obs_active) noexcept;

enum class Feasibility { Feasible, InfiniteRate, EmptyInterior };

[[nodiscard]] std::string_view to_string(Feasibility f) noexcept;

/// InfiniteRate when D_s < tr K_Z or D_o <= 0. EmptyInterior when
/// D_s = tr K_Z and H != 0 (every positive-definite Delta has
/// tr(H Delta H^T) > 0). With H = 0 the state constraint is vacuous.
[[nodiscard]] Feasibility check_feasibility(const GaussianSemanticModel& model, const DistortionBudget& budget);

struct GaussianSolverOptions {
    /// Outer loop stops when nu / t falls below this, nu being the barrier
    /// parameter (a bound on the duality gap of -logdet).
    double gap_tol = 1e-9;
    double t_init = 1.0;
    double t_factor = 10.0;
    int max_centering_iterations = 200;
    /// Newton decrement squared at which centering stops.
    double centering_tol = 1e-12;
    /// Use the dense Newton system even when the structured one applies.
    bool force_dense = false;
};

// ------------------------------------------------------ generic maxdet

/// tr(A Delta) <= b, A symmetric positive semidefinite.
struct TraceConstraint {
    Matrix A;
    double b = kInf;
};

/// C Delta C^T <= B.
struct LmiConstraint {
    Matrix C;
    Matrix B;
};

/// max logdet Delta s.t. O < Delta <= K plus trace and LMI constraints.
struct MaxdetProblem {
    Matrix K;
    std::vector<TraceConstraint> traces;
    std::vector<LmiConstraint> lmis;
};

struct MaxdetResult {
    Matrix Delta;
    std::vector<double> trace_multipliers;
    std::vector<bool> trace_active;
    Matrix psi;                       ///< dual of Delta <= K
    std::vector<Matrix> lmi_multipliers;
    std::vector<bool> lmi_active;
    long newton_iterations = 0;
    int outer_iterations = 0;
    /// logdet Delta at the end of each centering step.
    std::vector<double> path_logdet;
    double gap_bound = 0.0;  ///< nu / t at exit
};

/// Throws InfeasibleBudget if the strict interior is empty, NewtonFailure if
/// a centering step does not converge.
[[nodiscard]] MaxdetResult solve_maxdet(const MaxdetProblem& problem, const GaussianSolverOptions& opts = {});

// ------------------------------------------------------ rate functions

struct GaussianRdfSolution {
    double rate = 0.0;  ///< nats
    Matrix Delta;
    double lambda = 0.0;        ///< multiplier of tr Delta <= D_o
    std::vector<double> mu;     ///< multipliers of the state constraints
    Matrix psi;                 ///< dual of Delta <= K_X
    bool obs_active = false;
    std::vector<bool> state_active;
    /// Matrix-budget duals (psd mode only): state LMI, observation LMI.
    Matrix psi_state;
    Matrix psi_obs;
    Region region = Region::A0;
    long newton_iterations = 0;
    std::vector<double> path_logdet;
    double gap_bound = 0.0;
};

/// Throws InfeasibleBudget (including EmptyInterior cases) or NewtonFailure.
[[nodiscard]] GaussianRdfSolution solve_gaussian_rdf(const GaussianSemanticModel& model, const DistortionBudget& budget,
                                                     const GaussianSolverOptions& opts = {});

/// Matrix budgets: H Delta H^T <= D_s - K_Z and Delta <= D_o. An empty
/// matrix drops that constraint.
[[nodiscard]] GaussianRdfSolution solve_gaussian_rdf_psd(const GaussianSemanticModel& model, const MatrixBudget& budget,
                                                         const GaussianSolverOptions& opts = {});

/// tr((w_s H^T H + w_o I) Delta) <= D_bar - w_s tr K_Z. Reported multipliers
/// are the two-constraint equivalents (lambda = w_o l, mu = w_s l).
[[nodiscard]] GaussianRdfSolution solve_gaussian_rdf_weighted(const GaussianSemanticModel& model,
                                                              const WeightedBudget& budget,
                                                              const GaussianSolverOptions& opts = {});

/// One trace constraint per intrinsic state plus the observation budget.
[[nodiscard]] GaussianRdfSolution solve_gaussian_rdf_multi(const MultiStateGaussianModel& model,
                                                           const MultiBudget& budget,
                                                           const GaussianSolverOptions& opts = {});

/// E[d_s(S, S^)] = tr(H K_X H^T - 2 H K_XS^ + K_Z + K_S^) for any
/// reproduction with cross covariance K_XS^ (m x l) and covariance K_S^.
[[nodiscard]] double linear_reproduction_state_distortion(const GaussianSemanticModel& model, const Matrix& K_XShat,
                                                          const Matrix& K_Shat);

struct GaussianKkt {
    double stationarity = 0.0;  ///< Frobenius norm
    double slack_obs = 0.0;     ///< |lambda (tr Delta - D_o)|
    std::vector<double> slack_state;
    double slack_psi = 0.0;     ///< |tr(Psi (K_X - Delta))|
};

/// KKT residuals of a solution in the convention above.
[[nodiscard]] GaussianKkt gaussian_kkt_residuals(const GaussianSemanticModel& model, const DistortionBudget& budget,
                                                 const GaussianRdfSolution& sol);

// ------------------------------------------------------ oracle

/// Projected-gradient ascent on logdet Delta from random interior starts,
/// with Dykstra alternating projections onto the constraint sets. Shares no
/// code with the interior-point path. Requires m <= 4 (TooLarge otherwise).
[[nodiscard]] double exhaustive_gaussian_oracle(const GaussianSemanticModel& model, const DistortionBudget& budget,
                                                unsigned seed = 1, int starts = 200);
[[nodiscard]] double exhaustive_gaussian_oracle_multi(const MultiStateGaussianModel& model, const MultiBudget& budget,
                                                      unsigned seed = 1, int starts = 200);

// ------------------------------------------------------ Gaussian upper bound

/// Finite-alphabet source whose symbols are points in R^l (state) and R^m
/// (observation). Reproduction points default to the source points.
struct MomentSource {
    Matrix joint_pmf;     ///< |S| x |X|
    Matrix state_points;  ///< |S| x l
    Matrix obs_points;    ///< |X| x m
    Matrix state_repro;   ///< |S^| x l, empty for state_points
    Matrix obs_repro;     ///< |X^| x m, empty for obs_points
};

/// Discrete source with squared-error distortion tables.
[[nodiscard]] DiscreteSemanticSource quadratic_discrete_source(const MomentSource& source);

/// Gaussian model with the same centered second moments.
[[nodiscard]] GaussianSemanticModel moment_matched_model(const MomentSource& source);

struct UpperBoundCheck {
    double rate_discrete = 0.0;
    double rate_gaussian = 0.0;
    bool holds = false;  ///< rate_discrete <= rate_gaussian + tol
};

[[nodiscard]] UpperBoundCheck gaussian_upper_bound_check(const MomentSource& source, const DistortionBudget& budget,
                                                         double tol, const DiscreteSolverOptions& dopts = {},
                                                         const GaussianSolverOptions& gopts = {});

}  // namespace semrd
