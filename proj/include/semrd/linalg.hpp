#pragma once

#include <Eigen/Dense>

namespace semrd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;

namespace linalg {

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kEigenFloor = 1e-10;

[[nodiscard]] Matrix symmetrize(const Matrix& m);
[[nodiscard]] bool is_symmetric(const Matrix& m, double tol = kSymmetryTol);
[[nodiscard]] double min_eigenvalue(const Matrix& sym);
[[nodiscard]] double max_eigenvalue(const Matrix& sym);

/// log det of a symmetric positive-definite matrix; returns false when the
/// Cholesky factorization fails.
[[nodiscard]] bool try_logdet_spd(const Matrix& sym, double& out);
[[nodiscard]] double logdet_spd(const Matrix& sym);

/// Symmetric square root through the eigendecomposition; negative
/// eigenvalues are clipped to zero, so semidefinite input is fine.
[[nodiscard]] Matrix psd_sqrt(const Matrix& sym);

/// Clip eigenvalues in [-floor, 0) to zero. Returns false if an eigenvalue
/// is below -floor (the matrix is left untouched in that case).
[[nodiscard]] bool clip_to_psd(Matrix& sym, double floor);

/// Projection onto the cone of positive semidefinite matrices (Frobenius).
[[nodiscard]] Matrix project_psd(const Matrix& sym);

[[nodiscard]] inline double frob_inner(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

}  // namespace linalg
}  // namespace semrd
