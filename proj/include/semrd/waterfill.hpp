#pragma once

// Weighted reverse water-filling. When one unitary Q diagonalizes both K_X
// and H^T H, the Gaussian program separates into
//   min 1/2 sum ln(sigma_j / delta_j)
//   s.t. 0 < delta_j <= sigma_j, sum alpha_j delta_j <= D_s - tr K_Z,
//        sum delta_j <= D_o,
// whose solution is delta_j = min(sigma_j, 1/(lambda + mu alpha_j)). The
// (D_s, D_o) plane splits into four regions by which budget binds.

#include <optional>
#include <utility>
#include <vector>

#include "semrd/gaussian.hpp"

namespace semrd {

struct SpectralModel {
    Vector sigma;              ///< eigenvalues of K_X in the joint basis
    Vector alpha;              ///< eigenvalues of H^T H, nonincreasing
    Eigen::Index q_rank = 0;   ///< number of positive alpha
    CMatrix Q;                 ///< columns are the joint eigenvectors
    double tr_KZ = 0.0;
    /// Circulant models: DFT bin of each coordinate (empty otherwise).
    std::vector<Eigen::Index> frequency;

    [[nodiscard]] Eigen::Index size() const noexcept { return sigma.size(); }
    [[nodiscard]] double trace_K_X() const { return sigma.sum(); }
    /// tr(H K_X H^T) + tr K_Z.
    [[nodiscard]] double state_ceiling() const { return alpha.dot(sigma) + tr_KZ; }
};

/// ||K_X H^T H - H^T H K_X||_F / (||K_X||_F ||H^T H||_F); 0 when H = 0.
[[nodiscard]] double relative_commutator(const GaussianSemanticModel& model);

/// Joint eigenbasis of K_X and H^T H, or nullopt when the relative
/// commutator exceeds `tol`. Eigenvalues of K_X whose relative gap is below
/// 1e-8 are clustered and H^T H is diagonalized inside each cluster.
[[nodiscard]] std::optional<SpectralModel> simultaneous_diagonalize(const GaussianSemanticModel& model,
                                                                    double tol = 1e-10);

/// Circulant K_X and H given by their first rows. sigma_j = DFT(kx)_j and
/// alpha_j = |DFT(h)_j|^2 with DFT(c)_j = sum_t c_t e^{-2 pi i j t / m}.
/// Throws NonPositiveSigma, NonSymmetric (kx must satisfy c_t = c_{m-t}) or
/// DimensionMismatch.
[[nodiscard]] SpectralModel circulant_spectral(const Vector& kx_first_row, const Vector& h_first_row, double tr_KZ);

/// Dense circulant matrix with the given first row: C(t, u) = c_{(u - t) mod m}.
[[nodiscard]] Matrix circulant_matrix(const Vector& first_row);

/// Point (D_s, D_o) of C_s at parameter lambda > 0.
[[nodiscard]] std::pair<double, double> curve_cs(const SpectralModel& sp, double lambda);
/// Point (D_s, D_o) of C_o at parameter mu > 0.
[[nodiscard]] std::pair<double, double> curve_co(const SpectralModel& sp, double mu);

/// Throws InfeasibleBudget when D_s < tr K_Z, D_o <= 0, or D_s = tr K_Z
/// with H != 0. Ties on a boundary are resolved as inactive.
[[nodiscard]] Region classify_region(const SpectralModel& sp, double D_s, double D_o);

/// Smallest relative distance from (D_s, D_o) to the region boundaries
/// (C_s, C_o and the two edges of A0), measured along the axis that
/// classify_region compares on.
[[nodiscard]] double region_boundary_margin(const SpectralModel& sp, double D_s, double D_o);

struct WaterfillSolution {
    Vector delta;
    double rate = 0.0;  ///< nats
    Region region = Region::A0;
    double lambda = 0.0;
    double mu = 0.0;
    Vector nu;
};

/// Throws InfeasibleBudget or RootFindingFailure.
[[nodiscard]] WaterfillSolution waterfill_solve(const SpectralModel& sp, double D_s, double D_o);

struct WaterfillKkt {
    double stationarity = 0.0;  ///< max_j |-1/delta_j + lambda + mu alpha_j + nu_j|
    double slack_obs = 0.0;     ///< |lambda (sum delta - D_o)|
    double slack_state = 0.0;   ///< |mu (sum alpha delta - D_s + tr K_Z)|
    double slack_nu = 0.0;      ///< max_j |nu_j (delta_j - sigma_j)|
    double min_dual = 0.0;      ///< min(lambda, mu, nu_j)
};

[[nodiscard]] WaterfillKkt kkt_residuals(const SpectralModel& sp, double D_s, double D_o, const WaterfillSolution& sol);

/// Delta = Q diag(delta) Q^H (real part; the imaginary part vanishes for
/// conjugate-symmetric spectra).
[[nodiscard]] Matrix delta_matrix(const SpectralModel& sp, const Vector& delta);

}  // namespace semrd
