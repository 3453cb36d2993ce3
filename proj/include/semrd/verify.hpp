#pragma once

// Achievability checks for the Gaussian solution: the test channel
//   X^ = (I - Delta K_X^{-1}) X + U,  U ~ N(0, Delta - Delta K_X^{-1} Delta),
//   S^ = H X^,
// its closed-form distortions, and a Monte Carlo estimate of them.

#include <cstddef>
#include <cstdint>

#include "semrd/model.hpp"

namespace semrd {

struct TestChannel {
    Matrix gain;       ///< I - Delta K_X^{-1}
    Matrix noise_cov;  ///< Delta - Delta K_X^{-1} Delta
    Matrix state_map;  ///< H: S^ = H X^
    Matrix Delta;
    GaussianSemanticModel model;
};

/// Requires O < Delta <= K_X (up to 1e-10 relative), else DeltaOutOfRange.
/// Noise eigenvalues in [-1e-10, 0) are clipped to zero.
[[nodiscard]] TestChannel build_test_channel(const GaussianSemanticModel& model, const Matrix& Delta);

/// Smallest eigenvalue of Delta - Delta K^{-1} Delta.
[[nodiscard]] double lemma2_psd_check(const Matrix& Delta, const Matrix& K);

struct ChannelMoments {
    Matrix K_XXhat;  ///< Cov(X, X^)
    Matrix K_Xhat;   ///< Cov(X^)
    Matrix K_XShat;  ///< Cov(X, S^)
    Matrix K_Shat;   ///< Cov(S^)
};

[[nodiscard]] ChannelMoments channel_moments(const TestChannel& channel);

struct ChannelDistortions {
    double D_o = 0.0;  ///< E||X - X^||^2
    double D_s = 0.0;  ///< E||S - S^||^2
};

/// Exact distortions from the channel's second moments.
[[nodiscard]] ChannelDistortions closed_form_distortions(const TestChannel& channel);

struct MonteCarloEstimate {
    double Do_hat = 0.0;
    double Ds_hat = 0.0;
    double Do_se = 0.0;  ///< standard error of Do_hat
    double Ds_se = 0.0;
    std::size_t samples = 0;
};

/// Samples X, Z (Gaussian with covariance K_Z) and U, forms X^ and S^, and
/// averages the squared errors. Samples are drawn in fixed shards from a
/// counter-based generator keyed by `seed`, so the result does not depend
/// on `workers` (0 picks the default, see default_worker_count).
[[nodiscard]] MonteCarloEstimate monte_carlo_distortions(const TestChannel& channel, std::size_t n_samples,
                                                         std::uint64_t seed, unsigned workers = 0);

/// 1/2 (logdet K_X - logdet Delta). Throws DeltaOutOfRange.
[[nodiscard]] double rate_of_test_channel(const GaussianSemanticModel& model, const Matrix& Delta);

/// Hardware concurrency, capped by the SEMRD_WORKERS environment variable.
[[nodiscard]] unsigned default_worker_count();

}  // namespace semrd
