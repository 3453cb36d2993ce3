#include "semrd/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

namespace semrd {

double relative_commutator(const GaussianSemanticModel& model) {
    const Matrix& K = model.K_X();
    const Matrix B = model.HtH();
    const double scale = K.norm() * B.norm();
    if (scale == 0.0) return 0.0;
    return (K * B - B * K).norm() / scale;
}

namespace {

void sort_by_alpha(SpectralModel& sp) {
    const Eigen::Index m = sp.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return sp.alpha(a) > sp.alpha(b); });
    SpectralModel out;
    out.sigma.resize(m);
    out.alpha.resize(m);
    out.Q.resize(sp.Q.rows(), m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const Eigen::Index j = order[static_cast<std::size_t>(k)];
        out.sigma(k) = sp.sigma(j);
        out.alpha(k) = sp.alpha(j);
        out.Q.col(k) = sp.Q.col(j);
        if (!sp.frequency.empty()) out.frequency.push_back(sp.frequency[static_cast<std::size_t>(j)]);
    }
    const double top = out.alpha.size() > 0 ? out.alpha.cwiseAbs().maxCoeff() : 0.0;
    out.q_rank = 0;
    for (Eigen::Index k = 0; k < m; ++k) {
        if (out.alpha(k) <= 1e-12 * top) out.alpha(k) = 0.0;
        else ++out.q_rank;
    }
    out.tr_KZ = sp.tr_KZ;
    sp = std::move(out);
}

// Level w with sum_j min(v_j, w) = total, for 0 < total < sum v.
double fill_level(std::vector<double> v, double total) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    double below = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = (total - below) / static_cast<double>(n - k);
        if (w <= v[k]) return w;
        below += v[k];
    }
    return v.empty() ? 0.0 : v.back();
}

// State distortion of the solution with only the observation budget.
double obs_only_state(const SpectralModel& sp, double D_o) {
    if (D_o >= sp.trace_K_X()) return sp.state_ceiling();
    const double w = fill_level({sp.sigma.data(), sp.sigma.data() + sp.size()}, D_o);
    return sp.alpha.dot(sp.sigma.cwiseMin(w)) + sp.tr_KZ;
}

// Observation distortion of the solution with only the state budget.
double state_only_obs(const SpectralModel& sp, double D_s) {
    if (sp.q_rank == 0 || D_s >= sp.state_ceiling()) return sp.trace_K_X();
    std::vector<double> v;
    for (Eigen::Index j = 0; j < sp.q_rank; ++j) v.push_back(sp.alpha(j) * sp.sigma(j));
    const double u = fill_level(v, D_s - sp.tr_KZ);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < sp.size(); ++j) acc += j < sp.q_rank ? std::min(sp.sigma(j), u / sp.alpha(j)) : sp.sigma(j);
    return acc;
}

void check_budget(const SpectralModel& sp, double D_s, double D_o) {
    if (std::isnan(D_s) || std::isnan(D_o)) throw Error(Errc::InvalidArgument, "budget is NaN");
    if (!(D_o > 0.0)) throw Error(Errc::InfeasibleBudget, "D_o must be positive");
    if (D_s < sp.tr_KZ) throw Error(Errc::InfeasibleBudget, "D_s below tr(K_Z)");
    if (D_s == sp.tr_KZ && sp.q_rank > 0)
        throw Error(Errc::InfeasibleBudget, "D_s equals tr(K_Z): no positive delta meets the state budget");
}

struct Levels {
    double obs = 0.0;
    double state = 0.0;
};

Levels distortions_at(const SpectralModel& sp, double lambda, double mu) {
    Levels out;
    for (Eigen::Index j = 0; j < sp.size(); ++j) {
        const double d = lambda + mu * sp.alpha(j);
        const double v = d > 0.0 ? std::min(sp.sigma(j), 1.0 / d) : sp.sigma(j);
        out.obs += v;
        out.state += sp.alpha(j) * v;
    }
    return out;
}

// lambda >= 0 with sum_j min(sigma_j, 1/(lambda + mu alpha_j)) = D_o.
double lambda_for(const SpectralModel& sp, double mu, double D_o) {
    if (distortions_at(sp, 0.0, mu).obs <= D_o) return 0.0;
    double lo = 0.0;
    double hi = static_cast<double>(sp.size()) / D_o;
    for (int it = 0; it < 300 && hi - lo > 2e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (distortions_at(sp, mid, mu).obs > D_o) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Newton on (lambda, mu) with the saturation pattern held fixed.
void polish(const SpectralModel& sp, double D_s, double D_o, double& lambda, double& mu) {
    const double B = D_s - sp.tr_KZ;
    auto residual = [&](double l, double u) {
        const Levels lv = distortions_at(sp, l, u);
        return Eigen::Vector2d(lv.obs - D_o, lv.state - B);
    };
    for (int it = 0; it < 6; ++it) {
        const Eigen::Vector2d r = residual(lambda, mu);
        Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
        for (Eigen::Index j = 0; j < sp.size(); ++j) {
            const double d = lambda + mu * sp.alpha(j);
            if (!(1.0 / d < sp.sigma(j))) continue;
            const double a = sp.alpha(j);
            const double g = 1.0 / (d * d);
            J(0, 0) -= g;
            J(0, 1) -= a * g;
            J(1, 0) -= a * g;
            J(1, 1) -= a * a * g;
        }
        const Eigen::Vector2d step = J.fullPivLu().solve(-r);
        if (!step.allFinite()) return;
        const double nl = lambda + step(0);
        const double nm = mu + step(1);
        if (!(nl > 0.0 && nm > 0.0)) return;
        if (residual(nl, nm).norm() >= r.norm()) return;
        lambda = nl;
        mu = nm;
    }
}


}  // namespace

std::optional<SpectralModel> simultaneous_diagonalize(const GaussianSemanticModel& model, double tol) {
    if (relative_commutator(model) > tol) return std::nullopt;
    const Matrix& K = model.K_X();
    const Matrix B = model.HtH();
    const Eigen::Index m = K.rows();
    Eigen::SelfAdjointEigenSolver<Matrix> es(K);
    const Vector& ev = es.eigenvalues();
    Matrix V = es.eigenvectors();
    const double top = ev.cwiseAbs().maxCoeff();
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i <= m; ++i) {
        if (i < m && ev(i) - ev(i - 1) <= 1e-8 * top) continue;
        const Eigen::Index len = i - start;
        if (len > 1) {
            const Matrix block = V.middleCols(start, len);
            Eigen::SelfAdjointEigenSolver<Matrix> inner(linalg::symmetrize(block.transpose() * B * block));
            V.middleCols(start, len) = block * inner.eigenvectors();
        }
        start = i;
    }
    SpectralModel sp;
    sp.sigma = ev;
    sp.alpha = (V.transpose() * B * V).diagonal();
    sp.Q = V.cast<std::complex<double>>();
    sp.tr_KZ = model.trace_K_Z();
    sort_by_alpha(sp);
    return sp;
}

SpectralModel circulant_spectral(const Vector& kx_first_row, const Vector& h_first_row, double tr_KZ) {
    const Eigen::Index m = kx_first_row.size();
    if (m == 0 || h_first_row.size() != m) throw Error(Errc::DimensionMismatch, "first rows must have equal nonzero length");
    if (!(tr_KZ >= 0.0)) throw Error(Errc::InvalidArgument, "tr(K_Z) must be nonnegative");
    const double scale = kx_first_row.cwiseAbs().maxCoeff();
    for (Eigen::Index t = 1; t < m; ++t)
        if (std::abs(kx_first_row(t) - kx_first_row(m - t)) > linalg::kSymmetryTol * std::max(1.0, scale))
            throw Error(Errc::NonSymmetric, "K_X first row must satisfy c_t = c_{m-t}");
    const double two_pi = 2.0 * std::numbers::pi;
    SpectralModel sp;
    sp.sigma.resize(m);
    sp.alpha.resize(m);
    sp.Q.resize(m, m);
    const double norm = 1.0 / std::sqrt(static_cast<double>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        std::complex<double> kx = 0.0;
        std::complex<double> h = 0.0;
        for (Eigen::Index t = 0; t < m; ++t) {
            // Reduce j t mod m first so the angle stays accurate.
            const double ang = -two_pi * static_cast<double>((j * t) % m) / static_cast<double>(m);
            const std::complex<double> w(std::cos(ang), std::sin(ang));
            kx += kx_first_row(t) * w;
            h += h_first_row(t) * w;
            sp.Q(t, j) = w * norm;
        }
        if (!(kx.real() > 0.0)) throw Error(Errc::NonPositiveSigma, "circulant K_X has a nonpositive eigenvalue");
        sp.sigma(j) = kx.real();
        sp.alpha(j) = std::norm(h);
        sp.frequency.push_back(j);
    }
    sp.tr_KZ = tr_KZ;
    sort_by_alpha(sp);
    return sp;
}

Matrix circulant_matrix(const Vector& first_row) {
    const Eigen::Index m = first_row.size();
    Matrix c(m, m);
    for (Eigen::Index t = 0; t < m; ++t)
        for (Eigen::Index u = 0; u < m; ++u) c(t, u) = first_row((u - t + m) % m);
    return c;
}

std::pair<double, double> curve_cs(const SpectralModel& sp, double lambda) {
    const Vector d = sp.sigma.cwiseMin(1.0 / lambda);
    return {sp.alpha.dot(d) + sp.tr_KZ, d.sum()};
}

std::pair<double, double> curve_co(const SpectralModel& sp, double mu) {
    double ds = sp.tr_KZ;
    double dob = 0.0;
    for (Eigen::Index j = 0; j < sp.size(); ++j) {
        if (j < sp.q_rank) {
            const double v = std::min(sp.sigma(j), 1.0 / (mu * sp.alpha(j)));
            ds += sp.alpha(j) * v;
            dob += v;
        } else {
            dob += sp.sigma(j);
        }
    }
    return {ds, dob};
}

Region classify_region(const SpectralModel& sp, double D_s, double D_o) {
    check_budget(sp, D_s, D_o);
    if (D_s >= sp.state_ceiling() && D_o >= sp.trace_K_X()) return Region::A0;
    if (obs_only_state(sp, D_o) <= D_s) return Region::A1;
    if (state_only_obs(sp, D_s) <= D_o) return Region::A2;
    return Region::A3;
}

double region_boundary_margin(const SpectralModel& sp, double D_s, double D_o) {
    const double full_s = sp.state_ceiling();
    const double full_o = sp.trace_K_X();
    double margin = std::min(std::abs(D_o - full_o) / full_o, std::abs(D_s - full_s) / full_s);
    if (D_o < full_o) margin = std::min(margin, std::abs(D_s - obs_only_state(sp, D_o)) / full_s);
    if (D_s < full_s) margin = std::min(margin, std::abs(D_o - state_only_obs(sp, D_s)) / full_o);
    return margin;
}

WaterfillSolution waterfill_solve(const SpectralModel& sp, double D_s, double D_o) {
    WaterfillSolution sol;
    sol.region = classify_region(sp, D_s, D_o);
    const Eigen::Index m = sp.size();
    sol.delta = sp.sigma;
    switch (sol.region) {
        case Region::A0:
            break;
        case Region::A1: {
            const double w = fill_level({sp.sigma.data(), sp.sigma.data() + m}, D_o);
            sol.lambda = 1.0 / w;
            sol.delta = sp.sigma.cwiseMin(w);
            break;
        }
        case Region::A2: {
            std::vector<double> v;
            for (Eigen::Index j = 0; j < sp.q_rank; ++j) v.push_back(sp.alpha(j) * sp.sigma(j));
            const double u = fill_level(v, D_s - sp.tr_KZ);
            sol.mu = 1.0 / u;
            for (Eigen::Index j = 0; j < sp.q_rank; ++j) sol.delta(j) = std::min(sp.sigma(j), u / sp.alpha(j));
            break;
        }
        case Region::A3: {
            const double B = D_s - sp.tr_KZ;
            auto state_at = [&](double mu) { return distortions_at(sp, lambda_for(sp, mu, D_o), mu).state; };
            double hi = 1.0;
            int guard = 0;
            while (state_at(hi) > B && guard++ < 2100) hi *= 2.0;
            double lo = hi;
            guard = 0;
            while (state_at(lo) <= B && guard++ < 2100) lo *= 0.5;
            if (state_at(hi) > B || state_at(lo) <= B) throw Error(Errc::RootFindingFailure, "cannot bracket mu");
            for (int it = 0; it < 300 && hi - lo > 2e-16 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (state_at(mid) > B) lo = mid;
                else hi = mid;
            }
            double mu = 0.5 * (lo + hi);
            double lambda = lambda_for(sp, mu, D_o);
            polish(sp, D_s, D_o, lambda, mu);
            sol.lambda = lambda;
            sol.mu = mu;
            for (Eigen::Index j = 0; j < m; ++j) sol.delta(j) = std::min(sp.sigma(j), 1.0 / (lambda + mu * sp.alpha(j)));
            const Levels lv = distortions_at(sp, lambda, mu);
            if (std::abs(lv.obs - D_o) > 1e-9 * (1.0 + D_o) || std::abs(lv.state - B) > 1e-9 * (1.0 + B))
                throw Error(Errc::RootFindingFailure, "water levels did not meet both budgets");
            break;
        }
    }
    sol.nu = Vector::Zero(m);
    for (Eigen::Index j = 0; j < m; ++j)
        if (sol.delta(j) == sp.sigma(j))
            sol.nu(j) = std::max(0.0, 1.0 / sol.delta(j) - sol.lambda - sol.mu * sp.alpha(j));
    double rate = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) rate += 0.5 * std::log(sp.sigma(j) / sol.delta(j));
    sol.rate = rate;
    return sol;
}

WaterfillKkt kkt_residuals(const SpectralModel& sp, double D_s, double D_o, const WaterfillSolution& sol) {
    WaterfillKkt k;
    const Eigen::Index m = sp.size();
    k.min_dual = std::min(sol.lambda, sol.mu);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double nu = sol.nu.size() == m ? sol.nu(j) : 0.0;
        k.stationarity = std::max(k.stationarity, std::abs(-1.0 / sol.delta(j) + sol.lambda + sol.mu * sp.alpha(j) + nu));
        k.slack_nu = std::max(k.slack_nu, std::abs(nu * (sol.delta(j) - sp.sigma(j))));
        k.min_dual = std::min(k.min_dual, nu);
    }
    if (sol.lambda != 0.0) k.slack_obs = std::abs(sol.lambda * (sol.delta.sum() - D_o));
    if (sol.mu != 0.0) k.slack_state = std::abs(sol.mu * (sp.alpha.dot(sol.delta) - D_s + sp.tr_KZ));
    return k;
}

Matrix delta_matrix(const SpectralModel& sp, const Vector& delta) {
    const CMatrix full = sp.Q * delta.cast<std::complex<double>>().asDiagonal() * sp.Q.adjoint();
    return linalg::symmetrize(full.real());
}

}  // namespace semrd
