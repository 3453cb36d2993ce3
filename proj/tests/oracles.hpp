#pragma once

// Reference values computed without the library's solvers.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

// R(D) of a uniform binary source under Hamming distortion, nats.
inline double binary_hamming_rate(double D) { return D >= 0.5 ? 0.0 : std::numbers::ln2 - binary_entropy(D); }

struct Scalar {
    double delta;
    double rate;
};

// m = 1: the three constraints on delta are all upper bounds.
inline Scalar scalar_rdf(double var, double h, double var_z, double D_s, double D_o) {
    double d = std::min(var, D_o);
    if (h != 0.0) d = std::min(d, (D_s - var_z) / (h * h));
    return {d, std::max(0.0, 0.5 * std::log(var / d))};
}

// Classic reverse water-filling on independent components with one sum budget.
inline Vector reverse_waterfill(const Vector& var, double D) {
    double lo = 0.0, hi = var.maxCoeff();
    for (int i = 0; i < 400; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (var.cwiseMin(mid).sum() > D) hi = mid; else lo = mid;
    }
    return var.cwiseMin(0.5 * (lo + hi));
}

inline double waterfill_rate(const Vector& var, const Vector& delta) {
    double r = 0.0;
    for (Eigen::Index j = 0; j < var.size(); ++j) r += 0.5 * std::log(var(j) / delta(j));
    return r;
}

inline Matrix random_orthogonal(int m, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix a(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a(i, j) = n(rng);
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ();
}

inline Matrix random_spd(int m, std::mt19937_64& rng, double lo = 0.2, double hi = 5.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    const Matrix q = random_orthogonal(m, rng);
    Vector ev(m);
    for (int i = 0; i < m; ++i) ev(i) = u(rng);
    Matrix k = q * ev.asDiagonal() * q.transpose();
    return 0.5 * (k + k.transpose());
}

inline double min_eig(const Matrix& s) { return Eigen::SelfAdjointEigenSolver<Matrix>(s).eigenvalues().minCoeff(); }

}  // namespace oracle
