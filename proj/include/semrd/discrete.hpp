#pragma once

// Semantic rate-distortion function of finite-alphabet sources.
//
// The state constraint is rewritten on the observation through the reduced
// distortion d^_s(x, s^) = sum_s p(s|x) d_s(s, s^), which leaves an ordinary
// multi-constraint rate-distortion problem over q(s^, x^ | x). That problem
// is solved in the dual: Blahut-Arimoto on the product reproduction
// alphabet for fixed multipliers, and a search over the multipliers until
// every budget is met with complementary slackness. Rates are in nats.

#include <cstdint>
#include <vector>

#include "semrd/model.hpp"

namespace semrd {

struct ReducedDistortion {
    Matrix table;  ///< |X| x |S^|
};

/// table(x, s^) = sum_s p(s|x) d_s(s, s^).
[[nodiscard]] ReducedDistortion reduce_state_distortion(const DiscreteSemanticSource& source);

struct DiscreteSolverOptions {
    /// Blahut-Arimoto stops once its certified gap between upper and lower
    /// bounds on the Lagrangian drops below this (nats).
    double ba_gap_tol = 1e-13;
    int ba_max_iterations = 50000;
    /// Active constraints are matched to within this absolute distortion.
    double outer_tol = 5e-8;
    int outer_max_rounds = 300;
};

struct DiscreteRdfSolution {
    double rate = 0.0;  ///< nats
    /// q(s^_0, ..., s^_{k-1}, x^ | x); rows are observation symbols, columns
    /// enumerate the product reproduction alphabet with x^ varying fastest.
    Matrix conditional_pmf;
    std::vector<double> achieved_Ds;  ///< one per state
    double achieved_Do = 0.0;
    std::vector<double> lambda_s;  ///< multipliers of the state constraints
    double lambda_o = 0.0;
    std::vector<bool> state_active;
    bool obs_active = false;
    long iterations = 0;  ///< total Blahut-Arimoto iterations
    bool converged = false;
};

/// min I(X; S^, X^) s.t. E[d^_s] <= D_s, E[d_o] <= D_o. Throws
/// InfeasibleDistortion (with the minimal achievable pair) or
/// MaxIterationsExceeded.
[[nodiscard]] DiscreteRdfSolution solve_discrete_rdf(const DiscreteSemanticSource& source, const DistortionBudget& budget,
                                                     const DiscreteSolverOptions& opts = {});

/// k intrinsic states with one budget each plus the observation budget.
[[nodiscard]] DiscreteRdfSolution solve_discrete_rdf_multi(const MultiStateDiscreteSource& source,
                                                           const MultiBudget& budget,
                                                           const DiscreteSolverOptions& opts = {});

/// Single weighted constraint w_s E[d^_s] + w_o E[d_o] <= D_bar. The
/// reported multipliers are the equivalent two-constraint ones (w_s l, w_o l).
[[nodiscard]] DiscreteRdfSolution solve_discrete_weighted(const DiscreteSemanticSource& source,
                                                          const WeightedBudget& budget,
                                                          const DiscreteSolverOptions& opts = {});

/// Smallest achievable E[d^_s] and E[d_o] (deterministic reproductions).
[[nodiscard]] std::pair<double, double> minimal_distortions(const DiscreteSemanticSource& source);

struct ConditionalEvaluation {
    double rate = 0.0;
    std::vector<double> Ds;
    double Do = 0.0;
};

/// Re-evaluates I(X; reproduction) and the distortions of an arbitrary
/// conditional pmf laid out like DiscreteRdfSolution::conditional_pmf.
[[nodiscard]] ConditionalEvaluation evaluate_conditional(const MultiStateDiscreteSource& source, const Matrix& q);
[[nodiscard]] ConditionalEvaluation evaluate_conditional(const DiscreteSemanticSource& source, const Matrix& q);

// ------------------------------------------------------------- oracles

/// Brute-force rate on a simplex grid with `grid_steps` subdivisions per
/// row of q, followed by a barrier-Newton refinement started from the most
/// interior feasible grid point. Independent of the Blahut-Arimoto path.
/// Requires |X| |S^| |X^| <= 16 and grid_steps <= 20; throws TooLarge
/// otherwise or when the grid has more than 5e7 points.
[[nodiscard]] double exhaustive_discrete_oracle(const DiscreteSemanticSource& source, const DistortionBudget& budget,
                                                int grid_steps);
[[nodiscard]] double exhaustive_discrete_oracle_multi(const MultiStateDiscreteSource& source, const MultiBudget& budget,
                                                      int grid_steps);

/// Deterministic block encoder x^n -> s^^n for the block identity check.
/// Symbol sequences are indexed little-endian: index = sum_i a_i |A|^i.
struct BlockEncoder {
    int n = 1;
    std::vector<std::uint32_t> state_repro;  ///< |X|^n entries, each < |S^|^n
};

struct BlockIdentity {
    double lhs = 0.0;  ///< E[d_s(S^n, S^^n)] enumerated over (s^n, x^n)
    double rhs = 0.0;  ///< E[d^_s(X^n, S^^n)] enumerated over x^n
};

/// Exact enumeration of both sides of the one-shot-to-block distortion
/// identity for n <= 3 under the i.i.d. block law.
[[nodiscard]] BlockIdentity block_distortion_identity_check(const DiscreteSemanticSource& source,
                                                            const BlockEncoder& encoder);

}  // namespace semrd
