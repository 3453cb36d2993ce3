#pragma once

// Semantic-source descriptions: a hidden intrinsic state S observed only
// through an extrinsic observation X. Finite-alphabet sources carry a joint
// pmf and two distortion tables; Gaussian sources carry the linear
// state-observation structure S = H X + Z.

#include <cstddef>
#include <limits>
#include <vector>

#include "semrd/error.hpp"
#include "semrd/linalg.hpp"

namespace semrd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------- discrete

/// Finite-alphabet semantic source. Rows of the joint pmf index the state
/// alphabet S, columns the observation alphabet X. The state distortion is
/// |S| x |S^|, the observation distortion |X| x |X^|.
class DiscreteSemanticSource {
public:
    /// Validates and builds a source. Throws InvalidPmf, ZeroProbabilitySymbol,
    /// InvalidDistortion or DimensionMismatch.
    static DiscreteSemanticSource create(Matrix joint_pmf, Matrix state_distortion, Matrix obs_distortion);

    [[nodiscard]] std::size_t state_size() const noexcept { return static_cast<std::size_t>(joint_.rows()); }
    [[nodiscard]] std::size_t obs_size() const noexcept { return static_cast<std::size_t>(joint_.cols()); }
    [[nodiscard]] std::size_t state_repro_size() const noexcept { return static_cast<std::size_t>(d_s_.cols()); }
    [[nodiscard]] std::size_t obs_repro_size() const noexcept { return static_cast<std::size_t>(d_o_.cols()); }

    [[nodiscard]] const Matrix& joint_pmf() const noexcept { return joint_; }
    [[nodiscard]] const Matrix& state_distortion() const noexcept { return d_s_; }
    [[nodiscard]] const Matrix& obs_distortion() const noexcept { return d_o_; }
    /// p(x), strictly positive by construction.
    [[nodiscard]] const Vector& obs_marginal() const noexcept { return p_x_; }
    /// p(s|x) as an |S| x |X| column-stochastic matrix.
    [[nodiscard]] Matrix state_given_obs() const;

private:
    DiscreteSemanticSource(Matrix joint, Matrix d_s, Matrix d_o, Vector p_x)
        : joint_(std::move(joint)), d_s_(std::move(d_s)), d_o_(std::move(d_o)), p_x_(std::move(p_x)) {}

    Matrix joint_;
    Matrix d_s_;
    Matrix d_o_;
    Vector p_x_;
};

/// Several intrinsic states sharing one observation. Each state j carries
/// its own joint pmf p(s_j, x) (all with the same x-marginal) and its own
/// distortion table; the reduced distortions only need these pairwise laws.
class MultiStateDiscreteSource {
public:
    struct State {
        Matrix joint_pmf;
        Matrix distortion;
    };

    static MultiStateDiscreteSource create(std::vector<State> states, Matrix obs_distortion);
    static MultiStateDiscreteSource from_single(const DiscreteSemanticSource& source);

    [[nodiscard]] std::size_t num_states() const noexcept { return states_.size(); }
    [[nodiscard]] const std::vector<DiscreteSemanticSource>& states() const noexcept { return states_; }
    [[nodiscard]] const Matrix& obs_distortion() const noexcept { return states_.front().obs_distortion(); }
    [[nodiscard]] const Vector& obs_marginal() const noexcept { return states_.front().obs_marginal(); }
    [[nodiscard]] std::size_t obs_size() const noexcept { return states_.front().obs_size(); }

private:
    explicit MultiStateDiscreteSource(std::vector<DiscreteSemanticSource> states) : states_(std::move(states)) {}
    std::vector<DiscreteSemanticSource> states_;
};

/// Source whose state is a deterministic function g of the observation:
/// p(s, x) = p(x) 1{s = g(x)}. The state alphabet size is d_s.rows().
[[nodiscard]] DiscreteSemanticSource deterministic_state_source(const Vector& p_x, const std::vector<std::size_t>& g,
                                                                const Matrix& d_s, const Matrix& d_o);

/// Hamming distortion table of size rows x cols.
[[nodiscard]] Matrix hamming_distortion(std::size_t rows, std::size_t cols);

// ---------------------------------------------------------------- gaussian

/// X ~ N(0, K_X) with S = H X + Z, Z zero mean with covariance K_Z and
/// independent of X. Matrices are stored symmetrized.
class GaussianSemanticModel {
public:
    [[nodiscard]] const Matrix& K_X() const noexcept { return k_x_; }
    [[nodiscard]] const Matrix& H() const noexcept { return h_; }
    [[nodiscard]] const Matrix& K_Z() const noexcept { return k_z_; }
    [[nodiscard]] Eigen::Index obs_dim() const noexcept { return k_x_.rows(); }
    [[nodiscard]] Eigen::Index state_dim() const noexcept { return h_.rows(); }
    [[nodiscard]] double trace_K_Z() const noexcept { return k_z_.trace(); }
    /// tr(H K_X H^T) + tr(K_Z): the state distortion of the zero-rate reproduction.
    [[nodiscard]] double state_distortion_ceiling() const { return (h_ * k_x_ * h_.transpose()).trace() + k_z_.trace(); }
    [[nodiscard]] Matrix HtH() const { return h_.transpose() * h_; }

private:
    friend GaussianSemanticModel validate_gaussian_model(const Matrix&, const Matrix&, const Matrix&);
    GaussianSemanticModel(Matrix k_x, Matrix h, Matrix k_z) : k_x_(std::move(k_x)), h_(std::move(h)), k_z_(std::move(k_z)) {}

    Matrix k_x_;
    Matrix h_;
    Matrix k_z_;
};

/// Checks dimensions, symmetrizes by (M + M^T)/2, and verifies K_X is
/// positive definite (smallest eigenvalue > 1e-10 x largest) and K_Z is
/// positive semidefinite. Throws DimensionMismatch, NonSymmetric,
/// NotPositiveDefinite or NotPsd.
[[nodiscard]] GaussianSemanticModel validate_gaussian_model(const Matrix& K_X, const Matrix& H, const Matrix& K_Z);

struct LinearState {
    Matrix H;
    Matrix K_Z;
};

class MultiStateGaussianModel {
public:
    [[nodiscard]] const Matrix& K_X() const noexcept { return k_x_; }
    [[nodiscard]] const std::vector<LinearState>& states() const noexcept { return states_; }
    [[nodiscard]] std::size_t num_states() const noexcept { return states_.size(); }
    [[nodiscard]] Eigen::Index obs_dim() const noexcept { return k_x_.rows(); }
    /// The j-th state as a single-state model.
    [[nodiscard]] GaussianSemanticModel state_model(std::size_t j) const;

private:
    friend MultiStateGaussianModel validate_multi_state_model(const Matrix&, const std::vector<LinearState>&);
    MultiStateGaussianModel(Matrix k_x, std::vector<LinearState> states) : k_x_(std::move(k_x)), states_(std::move(states)) {}

    Matrix k_x_;
    std::vector<LinearState> states_;
};

[[nodiscard]] MultiStateGaussianModel validate_multi_state_model(const Matrix& K_X, const std::vector<LinearState>& states);

/// For jointly Gaussian (S, X): H = K_SX K_X^{-1}, K_Z = K_S - K_SX K_X^{-1} K_SX^T.
/// Negative eigenvalues of K_Z above -1e-10 (relative) are clipped to zero;
/// anything lower means the joint covariance is not psd.
[[nodiscard]] LinearState jointly_gaussian_to_linear(const Matrix& K_S, const Matrix& K_SX, const Matrix& K_X);

// ------------------------------------------------------------------ budgets

/// Two-constraint budget (D_s, D_o). Infinite entries drop the constraint.
struct DistortionBudget {
    double D_s = kInf;
    double D_o = kInf;
};

/// w_s D_s + w_o D_o <= D_bar.
struct WeightedBudget {
    double w_s = 1.0;
    double w_o = 1.0;
    double D_bar = kInf;
};

/// Per-state budgets D_{s_j} plus the observation budget.
struct MultiBudget {
    std::vector<double> D_s;
    double D_o = kInf;
};

/// Matrix-valued budgets for the positive-semidefinite distortion measures.
struct MatrixBudget {
    Matrix D_s;
    Matrix D_o;
};

void validate_budget(const DistortionBudget& budget);
void validate_budget(const WeightedBudget& budget);
void validate_budget(const MultiBudget& budget);
void validate_budget(const MatrixBudget& budget);

}  // namespace semrd
