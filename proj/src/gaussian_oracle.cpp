// Brute-force reference for the Gaussian program: projected gradient ascent
// on logdet Delta, projections computed by Dykstra's alternating scheme.

#include <algorithm>
#include <cmath>
#include <random>

#include "semrd/gaussian.hpp"

namespace semrd {

namespace {

struct Halfspace {
    Matrix A;
    double b;
    double norm2;
};

class Projector {
public:
    Projector(Matrix K, std::vector<Halfspace> hs, double floor)
        : K_(std::move(K)), hs_(std::move(hs)), floor_(floor), n_sets_(2 + hs_.size()) {}

    Matrix project(const Matrix& y0) const {
        const Eigen::Index m = K_.rows();
        std::vector<Matrix> inc(n_sets_, Matrix::Zero(m, m));
        Matrix y = y0;
        for (int sweep = 0; sweep < 5000; ++sweep) {
            const Matrix before = y;
            for (std::size_t k = 0; k < n_sets_; ++k) {
                const Matrix z = y + inc[k];
                const Matrix p = project_one(k, z);
                inc[k] = z - p;
                y = p;
            }
            if ((y - before).norm() < 1e-14 * (1.0 + y.norm())) break;
        }
        return linalg::symmetrize(y);
    }

private:
    Matrix project_one(std::size_t k, const Matrix& z) const {
        if (k == 0) return K_ - linalg::project_psd(linalg::symmetrize(K_ - z));
        if (k == 1) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::symmetrize(z));
            const Vector ev = es.eigenvalues().cwiseMax(floor_);
            return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
        }
        const Halfspace& h = hs_[k - 2];
        const double over = linalg::frob_inner(h.A, z) - h.b;
        return over > 0.0 ? Matrix(z - (over / h.norm2) * h.A) : z;
    }

    Matrix K_;
    std::vector<Halfspace> hs_;
    double floor_;
    std::size_t n_sets_;
};

double logdet_or_minus_inf(const Matrix& d) {
    double v = 0.0;
    return linalg::try_logdet_spd(d, v) ? v : -kInf;
}

struct Ascent {
    Matrix delta;
    double value;
};

Ascent ascend(const Projector& proj, Matrix delta, int max_iterations) {
    const Eigen::Index m = delta.rows();
    double f = logdet_or_minus_inf(delta);
    Matrix grad = Eigen::LLT<Matrix>(delta).solve(Matrix::Identity(m, m));
    double step = 1.0 / grad.squaredNorm();
    for (int it = 0; it < max_iterations; ++it) {
        Matrix next;
        double fn = -kInf;
        for (int bt = 0; bt < 60; ++bt) {
            next = proj.project(delta + step * grad);
            fn = logdet_or_minus_inf(next);
            if (fn >= f + 1e-4 * linalg::frob_inner(grad, next - delta)) break;
            step *= 0.5;
        }
        const Matrix sd = next - delta;
        if (!(fn > -kInf)) break;
        const Matrix gn = Eigen::LLT<Matrix>(next).solve(Matrix::Identity(m, m));
        const double move = sd.norm();
        delta = next;
        f = fn;
        const Matrix yd = gn - grad;
        grad = gn;
        if (move < 1e-13 * (1.0 + delta.norm())) break;
        const double curv = -linalg::frob_inner(sd, yd);
        step = curv > 0.0 ? std::clamp(sd.squaredNorm() / curv, 1e-12, 1e8) : step * 2.0;
    }
    return {delta, f};
}

double run_oracle(const Matrix& K_in, const std::vector<TraceConstraint>& traces, unsigned seed, int starts) {
    const Eigen::Index m = K_in.rows();
    if (m > 4) throw Error(Errc::TooLarge, "the Gaussian oracle handles m <= 4");
    const Matrix K = linalg::symmetrize(K_in);
    std::vector<Halfspace> hs;
    for (const auto& tc : traces) {
        if (tc.b == kInf) continue;
        const double n2 = tc.A.squaredNorm();
        if (n2 == 0.0) {
            if (tc.b < 0.0) return kInf;
            continue;
        }
        if (!(tc.b > 0.0)) return kInf;
        hs.push_back({tc.A, tc.b, n2});
    }
    const double floor = 1e-10 * K.trace() / static_cast<double>(m);
    const Projector proj(K, hs, floor);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const double ldk = linalg::logdet_spd(K);
    Ascent best{Matrix(), -kInf};
    for (int s = 0; s < starts; ++s) {
        Matrix g(m, m);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j) g(i, j) = normal(rng);
        const Matrix start = proj.project(linalg::symmetrize(g * g.transpose()) * (K.trace() / static_cast<double>(m) / (1.0 + g.squaredNorm())));
        Ascent a = ascend(proj, start, 20);
        if (a.value > best.value) best = std::move(a);
    }
    if (!(best.value > -kInf)) return kInf;
    const Ascent fin = ascend(proj, best.delta, 200000);
    return std::max(0.0, 0.5 * (ldk - fin.value));
}

}  // namespace

double exhaustive_gaussian_oracle(const GaussianSemanticModel& model, const DistortionBudget& budget, unsigned seed,
                                  int starts) {
    validate_budget(budget);
    if (model.obs_dim() > 4) throw Error(Errc::TooLarge, "the Gaussian oracle handles m <= 4");
    if (check_feasibility(model, budget) != Feasibility::Feasible) return kInf;
    const Eigen::Index m = model.obs_dim();
    return run_oracle(model.K_X(),
                      {{model.HtH(), budget.D_s - model.trace_K_Z()}, {Matrix::Identity(m, m), budget.D_o}}, seed, starts);
}

double exhaustive_gaussian_oracle_multi(const MultiStateGaussianModel& model, const MultiBudget& budget, unsigned seed,
                                        int starts) {
    validate_budget(budget);
    if (model.obs_dim() > 4) throw Error(Errc::TooLarge, "the Gaussian oracle handles m <= 4");
    if (budget.D_s.size() != model.num_states())
        throw Error(Errc::DimensionMismatch, "one state budget per intrinsic state is required");
    if (!(budget.D_o > 0.0)) return kInf;
    std::vector<TraceConstraint> traces;
    for (std::size_t j = 0; j < model.num_states(); ++j) {
        const LinearState& st = model.states()[j];
        traces.push_back({st.H.transpose() * st.H, budget.D_s[j] - st.K_Z.trace()});
    }
    const Eigen::Index m = model.obs_dim();
    traces.push_back({Matrix::Identity(m, m), budget.D_o});
    return run_oracle(model.K_X(), traces, seed, starts);
}

}  // namespace semrd
