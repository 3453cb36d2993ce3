#include "semrd/gaussian.hpp"

#include <algorithm>
#include <cmath>

namespace semrd {

std::string_view to_string(Region region) noexcept {
    switch (region) {
        case Region::A0: return "A0";
        case Region::A1: return "A1";
        case Region::A2: return "A2";
        case Region::A3: return "A3";
    }
    return "?";
}

Region region_from_activity(bool state_active, bool obs_active) noexcept {
    if (state_active) return obs_active ? Region::A3 : Region::A2;
    return obs_active ? Region::A1 : Region::A0;
}

std::string_view to_string(Feasibility f) noexcept {
    switch (f) {
        case Feasibility::Feasible: return "feasible";
        case Feasibility::InfiniteRate: return "infinite-rate";
        case Feasibility::EmptyInterior: return "empty-interior";
    }
    return "?";
}

namespace {

Feasibility state_feasibility(const Matrix& H, double tr_kz, double D_s) {
    if (D_s < tr_kz) return Feasibility::InfiniteRate;
    if (D_s == tr_kz && H.cwiseAbs().maxCoeff() > 0.0) return Feasibility::EmptyInterior;
    return Feasibility::Feasible;
}

void throw_if_infeasible(Feasibility f, const char* which) {
    if (f == Feasibility::InfiniteRate)
        throw Error(Errc::InfeasibleBudget, std::string(which) + " below tr(K_Z): the rate is infinite");
    if (f == Feasibility::EmptyInterior)
        throw Error(Errc::InfeasibleBudget,
                    std::string(which) + " equals tr(K_Z): no positive-definite Delta meets the state budget");
}

void check_obs_budget(double D_o) {
    if (!(D_o > 0.0)) throw Error(Errc::InfeasibleBudget, "D_o must be positive: the rate is infinite");
}

// ----------------------------------------------------------- barrier

struct Active {
    std::vector<TraceConstraint> traces;
    std::vector<std::size_t> trace_index;
    std::vector<LmiConstraint> lmis;
    std::vector<std::size_t> lmi_index;
};

struct Point {
    Matrix delta;
    Eigen::LLT<Matrix> chol;  // of delta
    Matrix P;                 // delta^{-1}
    Matrix G;                 // (K - delta)^{-1}
    std::vector<double> s;    // trace slacks
    std::vector<Matrix> Sinv; // inverse LMI slacks
    std::vector<Matrix> Chat; // C^T S^{-1} C
};

class Barrier {
public:
    Barrier(const Matrix& K, const Active& act) : K_(K), act_(act), m_(K.rows()) {}

    // Returns false if delta is outside the open feasible set.
    // Trace slacks are carried alongside delta rather than recomputed: the
    // difference b - tr(A delta) loses all relative accuracy as the slack
    // shrinks, and the multipliers 1/(t s) inherit that error.
    bool value(const Matrix& delta, const std::vector<double>& slack, double t, double& out) const {
        double ld = 0.0;
        if (!linalg::try_logdet_spd(delta, ld)) return false;
        double lk = 0.0;
        if (!linalg::try_logdet_spd(K_ - delta, lk)) return false;
        double f = -t * ld - lk;
        for (double s : slack) {
            if (!(s > 0.0)) return false;
            f -= std::log(s);
        }
        for (const auto& lmi : act_.lmis) {
            double ls = 0.0;
            if (!linalg::try_logdet_spd(lmi.B - lmi.C * delta * lmi.C.transpose(), ls)) return false;
            f -= ls;
        }
        out = f;
        return true;
    }

    bool prepare(const Matrix& delta, const std::vector<double>& slack, Point& pt) const {
        pt.delta = delta;
        pt.chol.compute(delta);
        if (pt.chol.info() != Eigen::Success) return false;
        const Matrix I = Matrix::Identity(m_, m_);
        pt.P = pt.chol.solve(I);
        Eigen::LLT<Matrix> up(K_ - delta);
        if (up.info() != Eigen::Success) return false;
        pt.G = up.solve(I);
        pt.s = slack;
        pt.Sinv.clear();
        pt.Chat.clear();
        for (const auto& lmi : act_.lmis) {
            Eigen::LLT<Matrix> sl(lmi.B - lmi.C * delta * lmi.C.transpose());
            if (sl.info() != Eigen::Success) return false;
            const Matrix Sinv = sl.solve(Matrix::Identity(lmi.B.rows(), lmi.B.rows()));
            pt.Chat.push_back(linalg::symmetrize(lmi.C.transpose() * Sinv * lmi.C));
            pt.Sinv.push_back(Sinv);
        }
        return true;
    }

    Matrix gradient(const Point& pt, double t) const {
        Matrix g = -t * pt.P + pt.G;
        for (std::size_t i = 0; i < act_.traces.size(); ++i) g += act_.traces[i].A / pt.s[i];
        for (const auto& ch : pt.Chat) g += ch;
        return linalg::symmetrize(g);
    }

    Matrix hessian_apply(const Point& pt, double t, const Matrix& D) const {
        Matrix h = t * pt.P * D * pt.P + pt.G * D * pt.G;
        for (std::size_t i = 0; i < act_.traces.size(); ++i)
            h += act_.traces[i].A * (linalg::frob_inner(act_.traces[i].A, D) / (pt.s[i] * pt.s[i]));
        for (const auto& ch : pt.Chat) h += ch * D * ch;
        return h;
    }

    // Kronecker-structured solve of the logdet part plus a Woodbury
    // correction for the rank-one trace terms. Needs no LMIs.
    Matrix newton_structured(const Point& pt, double t, const Matrix& rhs) const {
        const Matrix L = pt.chol.matrixL();
        const Matrix M = linalg::symmetrize(L.transpose() * pt.G * L);
        Eigen::SelfAdjointEigenSolver<Matrix> es(M);
        const Matrix W = L * es.eigenvectors();
        const Vector& gam = es.eigenvalues();
        Matrix scale(m_, m_);
        for (Eigen::Index i = 0; i < m_; ++i)
            for (Eigen::Index j = 0; j < m_; ++j) scale(i, j) = 1.0 / (t + gam(i) * gam(j));
        auto linv = [&](const Matrix& Y) -> Matrix {
            return W * (W.transpose() * Y * W).cwiseProduct(scale) * W.transpose();
        };
        Matrix D = linv(rhs);
        const std::size_t k = act_.traces.size();
        if (k == 0) return linalg::symmetrize(D);
        std::vector<Matrix> la(k);
        for (std::size_t i = 0; i < k; ++i) la[i] = linv(act_.traces[i].A);
        Matrix cap(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        Vector v(static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < k; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            v(ii) = linalg::frob_inner(act_.traces[i].A, D);
            for (std::size_t j = 0; j < k; ++j)
                cap(ii, static_cast<Eigen::Index>(j)) = linalg::frob_inner(act_.traces[i].A, la[j]);
            cap(ii, ii) += pt.s[i] * pt.s[i];
        }
        const Vector c = cap.ldlt().solve(v);
        for (std::size_t i = 0; i < k; ++i) D -= la[i] * c(static_cast<Eigen::Index>(i));
        return linalg::symmetrize(D);
    }

    // Dense Newton system in the m(m+1)/2 symmetric coordinates.
    Matrix newton_dense(const Point& pt, double t, const Matrix& rhs) const {
        std::vector<std::pair<Eigen::Index, Eigen::Index>> basis;
        for (Eigen::Index i = 0; i < m_; ++i)
            for (Eigen::Index j = i; j < m_; ++j) basis.emplace_back(i, j);
        const auto n = static_cast<Eigen::Index>(basis.size());
        auto unit = [&](Eigen::Index k) {
            Matrix E = Matrix::Zero(m_, m_);
            const auto [i, j] = basis[static_cast<std::size_t>(k)];
            E(i, j) = 1.0;
            E(j, i) = 1.0;
            return E;
        };
        auto coord = [&](const Matrix& Y, Eigen::Index k) {
            const auto [i, j] = basis[static_cast<std::size_t>(k)];
            return i == j ? Y(i, i) : Y(i, j) + Y(j, i);
        };
        Matrix hess(n, n);
        for (Eigen::Index l = 0; l < n; ++l) {
            const Matrix col = hessian_apply(pt, t, unit(l));
            for (Eigen::Index k = 0; k < n; ++k) hess(k, l) = coord(col, k);
        }
        Vector b(n);
        for (Eigen::Index k = 0; k < n; ++k) b(k) = coord(rhs, k);
        hess = linalg::symmetrize(hess);
        Vector x = hess.llt().solve(b);
        if (!x.allFinite()) x = hess.ldlt().solve(b);
        Matrix D = Matrix::Zero(m_, m_);
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto [i, j] = basis[static_cast<std::size_t>(k)];
            D(i, j) = x(k);
            D(j, i) = x(k);
        }
        return D;
    }

    [[nodiscard]] bool structured() const noexcept { return act_.lmis.empty(); }

private:
    const Matrix& K_;
    const Active& act_;
    Eigen::Index m_;
};

Active drop_redundant(const MaxdetProblem& prob) {
    const Eigen::Index m = prob.K.rows();
    Active act;
    for (std::size_t i = 0; i < prob.traces.size(); ++i) {
        const auto& tc = prob.traces[i];
        if (tc.A.rows() != m || tc.A.cols() != m) throw Error(Errc::DimensionMismatch, "trace constraint size");
        if (std::isnan(tc.b)) throw Error(Errc::InvalidArgument, "trace budget is NaN");
        if (tc.b == kInf) continue;
        if (linalg::frob_inner(tc.A, prob.K) <= tc.b) continue;
        if (!(tc.b > 0.0)) throw Error(Errc::InfeasibleBudget, "trace budget leaves no interior point");
        act.traces.push_back(tc);
        act.trace_index.push_back(i);
    }
    for (std::size_t k = 0; k < prob.lmis.size(); ++k) {
        const auto& lmi = prob.lmis[k];
        if (lmi.B.size() == 0) continue;
        if (lmi.C.cols() != m || lmi.B.rows() != lmi.C.rows() || lmi.B.cols() != lmi.B.rows())
            throw Error(Errc::DimensionMismatch, "matrix constraint size");
        const Matrix B = linalg::symmetrize(lmi.B);
        if (linalg::min_eigenvalue(B - lmi.C * prob.K * lmi.C.transpose()) >= 0.0) continue;
        Eigen::LLT<Matrix> chol(B);
        if (chol.info() != Eigen::Success || linalg::min_eigenvalue(B) <= 0.0)
            throw Error(Errc::InfeasibleBudget, "matrix budget leaves no interior point");
        act.lmis.push_back({lmi.C, B});
        act.lmi_index.push_back(k);
    }
    return act;
}

double initial_scale(const MaxdetProblem& prob, const Active& act) {
    double eps = 0.5;
    for (const auto& tc : act.traces) eps = std::min(eps, 0.5 * tc.b / linalg::frob_inner(tc.A, prob.K));
    for (const auto& lmi : act.lmis) {
        const Eigen::LLT<Matrix> chol(lmi.B);
        const Matrix Linv = chol.matrixL().solve(Matrix::Identity(lmi.B.rows(), lmi.B.rows()));
        const double top = linalg::max_eigenvalue(linalg::symmetrize(Linv * lmi.C * prob.K * lmi.C.transpose() * Linv.transpose()));
        eps = std::min(eps, 0.5 / top);
    }
    return eps;
}

}  // namespace

namespace {

// Stationarity remainder Delta^{-1} - sum y_i A_i - sum C^T Z C - Psi.
Matrix dual_remainder(const Active& act, const Matrix& delta_inv, const MaxdetResult& r, const Matrix& psi) {
    Matrix rem = delta_inv - psi;
    for (std::size_t i = 0; i < act.traces.size(); ++i) rem -= r.trace_multipliers[act.trace_index[i]] * act.traces[i].A;
    for (std::size_t k = 0; k < act.lmis.size(); ++k)
        rem -= act.lmis[k].C.transpose() * r.lmi_multipliers[act.lmi_index[k]] * act.lmis[k].C;
    return linalg::symmetrize(rem);
}

// The barrier duals degrade when K - Delta is nearly singular. Alternates
// Psi = psd part of the remainder with a least-squares refit of the active
// trace multipliers, and keeps the result only if the residual drops.
void polish_duals(const Active& act, const Matrix& delta, MaxdetResult& res) {
    const Matrix delta_inv = linalg::symmetrize(Eigen::LLT<Matrix>(delta).solve(Matrix::Identity(delta.rows(), delta.cols())));
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < act.traces.size(); ++i)
        if (res.trace_active[act.trace_index[i]]) active.push_back(i);
    MaxdetResult trial = res;
    double best = dual_remainder(act, delta_inv, res, res.psi).norm();
    for (int round = 0; round < 20; ++round) {
        trial.psi = linalg::project_psd(dual_remainder(act, delta_inv, trial, Matrix::Zero(delta.rows(), delta.cols())));
        if (!active.empty()) {
            const auto na = static_cast<Eigen::Index>(active.size());
            MaxdetResult zeroed = trial;
            for (const std::size_t i : active) zeroed.trace_multipliers[act.trace_index[i]] = 0.0;
            const Matrix target = dual_remainder(act, delta_inv, zeroed, trial.psi);
            Matrix gram(na, na);
            Vector rhs(na);
            for (Eigen::Index a = 0; a < na; ++a) {
                const Matrix& Aa = act.traces[active[static_cast<std::size_t>(a)]].A;
                rhs(a) = linalg::frob_inner(Aa, target);
                for (Eigen::Index b = 0; b < na; ++b)
                    gram(a, b) = linalg::frob_inner(Aa, act.traces[active[static_cast<std::size_t>(b)]].A);
            }
            const Vector y = gram.completeOrthogonalDecomposition().solve(rhs);
            for (Eigen::Index a = 0; a < na; ++a)
                trial.trace_multipliers[act.trace_index[active[static_cast<std::size_t>(a)]]] = std::max(0.0, y(a));
        }
        const double r = dual_remainder(act, delta_inv, trial, trial.psi).norm();
        if (r < best) {
            best = r;
            res.psi = trial.psi;
            res.trace_multipliers = trial.trace_multipliers;
        }
    }
}

}  // namespace

MaxdetResult solve_maxdet(const MaxdetProblem& problem, const GaussianSolverOptions& opts) {
    const Eigen::Index m = problem.K.rows();
    if (m == 0 || problem.K.cols() != m) throw Error(Errc::DimensionMismatch, "K must be square and nonempty");
    const Matrix K = linalg::symmetrize(problem.K);
    MaxdetProblem prob = problem;
    prob.K = K;
    const Active act = drop_redundant(prob);

    MaxdetResult res;
    res.trace_multipliers.assign(problem.traces.size(), 0.0);
    res.trace_active.assign(problem.traces.size(), false);
    res.lmi_multipliers.resize(problem.lmis.size());
    for (std::size_t k = 0; k < problem.lmis.size(); ++k)
        res.lmi_multipliers[k] = Matrix::Zero(problem.lmis[k].B.rows(), problem.lmis[k].B.rows());
    res.lmi_active.assign(problem.lmis.size(), false);

    if (act.traces.empty() && act.lmis.empty()) {
        res.Delta = K;
        res.psi = linalg::symmetrize(Eigen::LLT<Matrix>(K).solve(Matrix::Identity(m, m)));
        res.path_logdet.push_back(linalg::logdet_spd(K));
        return res;
    }

    const Barrier barrier(K, act);
    double nu = static_cast<double>(m + static_cast<Eigen::Index>(act.traces.size()));
    for (const auto& lmi : act.lmis) nu += static_cast<double>(lmi.B.rows());

    Matrix delta = initial_scale(prob, act) * K;
    std::vector<double> slack;
    for (const auto& tc : act.traces) slack.push_back(tc.b - linalg::frob_inner(tc.A, delta));
    auto moved_slack = [&](const Matrix& step, double s) {
        std::vector<double> out = slack;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= s * linalg::frob_inner(act.traces[i].A, step);
        return out;
    };
    Point pt;
    double t = opts.t_init;
    const bool use_structured = barrier.structured() && !opts.force_dense;
    while (true) {
        bool centered = false;
        double prev_dec2 = kInf;
        for (int it = 0; it < opts.max_centering_iterations; ++it) {
            if (!barrier.prepare(delta, slack, pt)) throw Error(Errc::NewtonFailure, "iterate left the feasible set");
            const Matrix grad = barrier.gradient(pt, t);
            const Matrix step = use_structured ? barrier.newton_structured(pt, t, -grad) : barrier.newton_dense(pt, t, -grad);
            const double dec2 = -linalg::frob_inner(grad, step);
            ++res.newton_iterations;
            if (!std::isfinite(dec2)) throw Error(Errc::NewtonFailure, "non-finite Newton step");
            // Once quadratic convergence stalls the decrement sits at its
            // rounding floor, which grows with t and the conditioning.
            if (dec2 < opts.centering_tol || (dec2 < 1e-3 && dec2 > 0.1 * prev_dec2)) {
                centered = true;
                break;
            }
            prev_dec2 = dec2;
            double f0 = 0.0;
            (void)barrier.value(delta, slack, t, f0);
            double s = 1.0;
            double f1 = 0.0;
            bool moved = false;
            // Near the centre the objective difference is lost in rounding;
            // a feasible full step is taken as is.
            if (dec2 < 0.1 && barrier.value(delta + step, moved_slack(step, 1.0), t, f1)) {
                moved = true;
            } else {
                while (s > 1e-14) {
                    if (barrier.value(delta + s * step, moved_slack(step, s), t, f1) && f1 <= f0 - 0.25 * s * dec2) {
                        moved = true;
                        break;
                    }
                    s *= 0.5;
                }
            }
            if (!moved) {
                if (dec2 < 1e-8) {
                    centered = true;
                    break;
                }
                throw Error(Errc::NewtonFailure, "line search failed");
            }
            delta = linalg::symmetrize(delta + s * step);
            slack = moved_slack(step, s);
        }
        if (!centered) {
            if (!barrier.prepare(delta, slack, pt)) throw Error(Errc::NewtonFailure, "iterate left the feasible set");
            const Matrix grad = barrier.gradient(pt, t);
            const Matrix step = use_structured ? barrier.newton_structured(pt, t, -grad) : barrier.newton_dense(pt, t, -grad);
            if (-linalg::frob_inner(grad, step) > 1e-8)
                throw Error(Errc::NewtonFailure, "centering did not converge");
        }
        ++res.outer_iterations;
        res.path_logdet.push_back(linalg::logdet_spd(delta));
        if (nu / t < opts.gap_tol) break;
        t *= opts.t_factor;
    }

    if (!barrier.prepare(delta, slack, pt)) throw Error(Errc::NewtonFailure, "final iterate infeasible");
    res.Delta = delta;
    res.psi = linalg::symmetrize(pt.G / t);
    res.gap_bound = nu / t;
    for (std::size_t i = 0; i < act.traces.size(); ++i) {
        const std::size_t idx = act.trace_index[i];
        res.trace_multipliers[idx] = 1.0 / (t * pt.s[i]);
        res.trace_active[idx] = pt.s[i] < 1e-6 * act.traces[i].b;
    }
    for (std::size_t k = 0; k < act.lmis.size(); ++k) {
        const std::size_t idx = act.lmi_index[k];
        res.lmi_multipliers[idx] = linalg::symmetrize(pt.Sinv[k] / t);
        const Matrix slack = act.lmis[k].B - act.lmis[k].C * delta * act.lmis[k].C.transpose();
        res.lmi_active[idx] = linalg::min_eigenvalue(linalg::symmetrize(slack)) < 1e-6 * linalg::max_eigenvalue(act.lmis[k].B);
    }
    polish_duals(act, delta, res);
    return res;
}

// ------------------------------------------------------------- rate functions

Feasibility check_feasibility(const GaussianSemanticModel& model, const DistortionBudget& budget) {
    validate_budget(budget);
    if (!(budget.D_o > 0.0)) return Feasibility::InfiniteRate;
    return state_feasibility(model.H(), model.trace_K_Z(), budget.D_s);
}

namespace {

double rate_from(const Matrix& K, const Matrix& delta) {
    return std::max(0.0, 0.5 * (linalg::logdet_spd(K) - linalg::logdet_spd(delta)));
}

GaussianRdfSolution package(const Matrix& K, const MaxdetResult& r) {
    GaussianRdfSolution sol;
    sol.rate = rate_from(K, r.Delta);
    sol.Delta = r.Delta;
    sol.psi = r.psi;
    sol.newton_iterations = r.newton_iterations;
    sol.path_logdet = r.path_logdet;
    sol.gap_bound = r.gap_bound;
    return sol;
}

}  // namespace

GaussianRdfSolution solve_gaussian_rdf(const GaussianSemanticModel& model, const DistortionBudget& budget,
                                       const GaussianSolverOptions& opts) {
    validate_budget(budget);
    check_obs_budget(budget.D_o);
    throw_if_infeasible(state_feasibility(model.H(), model.trace_K_Z(), budget.D_s), "D_s");
    const Eigen::Index m = model.obs_dim();
    MaxdetProblem prob{model.K_X(), {{model.HtH(), budget.D_s - model.trace_K_Z()}, {Matrix::Identity(m, m), budget.D_o}}, {}};
    const MaxdetResult r = solve_maxdet(prob, opts);
    GaussianRdfSolution sol = package(model.K_X(), r);
    sol.mu = {r.trace_multipliers[0]};
    sol.state_active = {r.trace_active[0]};
    sol.lambda = r.trace_multipliers[1];
    sol.obs_active = r.trace_active[1];
    sol.region = region_from_activity(sol.state_active[0], sol.obs_active);
    return sol;
}

GaussianRdfSolution solve_gaussian_rdf_psd(const GaussianSemanticModel& model, const MatrixBudget& budget,
                                           const GaussianSolverOptions& opts) {
    validate_budget(budget);
    const Eigen::Index m = model.obs_dim();
    const Eigen::Index l = model.state_dim();
    MaxdetProblem prob{model.K_X(), {}, {}};
    if (budget.D_s.size() > 0) {
        if (budget.D_s.rows() != l || budget.D_s.cols() != l)
            throw Error(Errc::DimensionMismatch, "state matrix budget must be l x l");
        prob.lmis.push_back({model.H(), linalg::symmetrize(budget.D_s) - model.K_Z()});
    } else {
        prob.lmis.push_back({model.H(), Matrix()});
    }
    if (budget.D_o.size() > 0) {
        if (budget.D_o.rows() != m || budget.D_o.cols() != m)
            throw Error(Errc::DimensionMismatch, "observation matrix budget must be m x m");
        prob.lmis.push_back({Matrix::Identity(m, m), linalg::symmetrize(budget.D_o)});
    } else {
        prob.lmis.push_back({Matrix::Identity(m, m), Matrix()});
    }
    const MaxdetResult r = solve_maxdet(prob, opts);
    GaussianRdfSolution sol = package(model.K_X(), r);
    sol.psi_state = r.lmi_multipliers[0];
    sol.psi_obs = r.lmi_multipliers[1];
    sol.state_active = {r.lmi_active[0]};
    sol.obs_active = r.lmi_active[1];
    sol.mu = {0.0};
    sol.region = region_from_activity(sol.state_active[0], sol.obs_active);
    return sol;
}

GaussianRdfSolution solve_gaussian_rdf_weighted(const GaussianSemanticModel& model, const WeightedBudget& budget,
                                                const GaussianSolverOptions& opts) {
    validate_budget(budget);
    const Eigen::Index m = model.obs_dim();
    const double b = budget.D_bar - budget.w_s * model.trace_K_Z();
    Matrix A = budget.w_s * model.HtH() + budget.w_o * Matrix::Identity(m, m);
    if (b < 0.0 || (b == 0.0 && A.cwiseAbs().maxCoeff() > 0.0))
        throw Error(Errc::InfeasibleBudget, "D_bar must exceed w_s tr(K_Z)");
    MaxdetProblem prob{model.K_X(), {{std::move(A), b}}, {}};
    const MaxdetResult r = solve_maxdet(prob, opts);
    GaussianRdfSolution sol = package(model.K_X(), r);
    const double ell = r.trace_multipliers[0];
    sol.lambda = budget.w_o * ell;
    sol.mu = {budget.w_s * ell};
    sol.obs_active = r.trace_active[0] && budget.w_o > 0.0;
    sol.state_active = {r.trace_active[0] && budget.w_s > 0.0};
    sol.region = region_from_activity(sol.state_active[0], sol.obs_active);
    return sol;
}

GaussianRdfSolution solve_gaussian_rdf_multi(const MultiStateGaussianModel& model, const MultiBudget& budget,
                                             const GaussianSolverOptions& opts) {
    validate_budget(budget);
    if (budget.D_s.size() != model.num_states())
        throw Error(Errc::DimensionMismatch, "one state budget per intrinsic state is required");
    check_obs_budget(budget.D_o);
    const Eigen::Index m = model.obs_dim();
    MaxdetProblem prob{model.K_X(), {}, {}};
    for (std::size_t j = 0; j < model.num_states(); ++j) {
        const LinearState& st = model.states()[j];
        const double tr_kz = st.K_Z.trace();
        throw_if_infeasible(state_feasibility(st.H, tr_kz, budget.D_s[j]), ("D_s[" + std::to_string(j) + "]").c_str());
        prob.traces.push_back({st.H.transpose() * st.H, budget.D_s[j] - tr_kz});
    }
    prob.traces.push_back({Matrix::Identity(m, m), budget.D_o});
    const MaxdetResult r = solve_maxdet(prob, opts);
    GaussianRdfSolution sol = package(model.K_X(), r);
    const std::size_t k = model.num_states();
    sol.mu.assign(r.trace_multipliers.begin(), r.trace_multipliers.begin() + static_cast<std::ptrdiff_t>(k));
    sol.state_active.assign(r.trace_active.begin(), r.trace_active.begin() + static_cast<std::ptrdiff_t>(k));
    sol.lambda = r.trace_multipliers[k];
    sol.obs_active = r.trace_active[k];
    const bool any_state = std::find(sol.state_active.begin(), sol.state_active.end(), true) != sol.state_active.end();
    sol.region = region_from_activity(any_state, sol.obs_active);
    return sol;
}

double linear_reproduction_state_distortion(const GaussianSemanticModel& model, const Matrix& K_XShat,
                                            const Matrix& K_Shat) {
    const Eigen::Index m = model.obs_dim();
    const Eigen::Index l = model.state_dim();
    if (K_XShat.rows() != m || K_XShat.cols() != l || K_Shat.rows() != l || K_Shat.cols() != l)
        throw Error(Errc::DimensionMismatch, "K_XS^ must be m x l and K_S^ l x l");
    const Matrix& H = model.H();
    return (H * model.K_X() * H.transpose()).trace() - 2.0 * (H * K_XShat).trace() + model.trace_K_Z() + K_Shat.trace();
}

GaussianKkt gaussian_kkt_residuals(const GaussianSemanticModel& model, const DistortionBudget& budget,
                                   const GaussianRdfSolution& sol) {
    const Eigen::Index m = model.obs_dim();
    const Matrix& D = sol.Delta;
    const double mu = sol.mu.empty() ? 0.0 : sol.mu.front();
    const Matrix P = Eigen::LLT<Matrix>(D).solve(Matrix::Identity(m, m));
    GaussianKkt k;
    k.stationarity = (-P + sol.lambda * Matrix::Identity(m, m) + mu * model.HtH() + sol.psi).norm();
    k.slack_obs = sol.lambda == 0.0 ? 0.0 : std::abs(sol.lambda * (D.trace() - budget.D_o));
    const double state_slack = (model.H() * D * model.H().transpose()).trace() - budget.D_s + model.trace_K_Z();
    k.slack_state = {mu == 0.0 ? 0.0 : std::abs(mu * state_slack)};
    k.slack_psi = std::abs(linalg::frob_inner(sol.psi, model.K_X() - D));
    return k;
}

// ------------------------------------------------------------- upper bound

namespace {

Matrix squared_distances(const Matrix& a, const Matrix& b) {
    Matrix d(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j) d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
    return d;
}

}  // namespace

DiscreteSemanticSource quadratic_discrete_source(const MomentSource& source) {
    if (source.state_points.rows() != source.joint_pmf.rows() || source.obs_points.rows() != source.joint_pmf.cols())
        throw Error(Errc::DimensionMismatch, "one point per symbol is required");
    const Matrix& sr = source.state_repro.size() > 0 ? source.state_repro : source.state_points;
    const Matrix& xr = source.obs_repro.size() > 0 ? source.obs_repro : source.obs_points;
    if (sr.cols() != source.state_points.cols() || xr.cols() != source.obs_points.cols())
        throw Error(Errc::DimensionMismatch, "reproduction points must live in the symbol space");
    return DiscreteSemanticSource::create(source.joint_pmf, squared_distances(source.state_points, sr),
                                          squared_distances(source.obs_points, xr));
}

GaussianSemanticModel moment_matched_model(const MomentSource& source) {
    const Matrix& p = source.joint_pmf;
    if (source.state_points.rows() != p.rows() || source.obs_points.rows() != p.cols())
        throw Error(Errc::DimensionMismatch, "one point per symbol is required");
    const Vector ps = p.rowwise().sum();
    const Vector px = p.colwise().sum().transpose();
    const Matrix sc = source.state_points.rowwise() - (ps.transpose() * source.state_points);
    const Matrix xc = source.obs_points.rowwise() - (px.transpose() * source.obs_points);
    const Matrix K_S = sc.transpose() * ps.asDiagonal() * sc;
    const Matrix K_X = xc.transpose() * px.asDiagonal() * xc;
    const Matrix K_SX = sc.transpose() * p * xc;
    const LinearState lin = jointly_gaussian_to_linear(K_S, K_SX, K_X);
    return validate_gaussian_model(K_X, lin.H, lin.K_Z);
}

UpperBoundCheck gaussian_upper_bound_check(const MomentSource& source, const DistortionBudget& budget, double tol,
                                           const DiscreteSolverOptions& dopts, const GaussianSolverOptions& gopts) {
    UpperBoundCheck out;
    const DiscreteSemanticSource disc = quadratic_discrete_source(source);
    try {
        out.rate_discrete = solve_discrete_rdf(disc, budget, dopts).rate;
    } catch (const InfeasibleDistortion&) {
        out.rate_discrete = kInf;
    }
    const GaussianSemanticModel model = moment_matched_model(source);
    if (check_feasibility(model, budget) == Feasibility::Feasible)
        out.rate_gaussian = solve_gaussian_rdf(model, budget, gopts).rate;
    else
        out.rate_gaussian = kInf;
    out.holds = out.rate_discrete <= out.rate_gaussian + tol;
    return out;
}

}  // namespace semrd
