// Verification oracles for the discrete solver: a simplex-grid brute force
// refined by a primal barrier-Newton method on q(t|x), and the exact block
// enumeration of the state-distortion identity. Nothing here goes through
// the Blahut-Arimoto code path.

#include <algorithm>
#include <cmath>

#include "semrd/discrete.hpp"

namespace semrd {

namespace {

constexpr double kMaxGridPoints = 5e7;

struct Problem {
    Vector p;                         // p(x)
    std::vector<Matrix> tables;       // per constraint: |X| x J (already lifted)
    std::vector<double> budgets;      // finite budgets only
    Eigen::Index nt = 0;              // joint reproduction alphabet size
};

// Lifts per-component tables to the product alphabet (last fastest) and
// keeps only constraints with finite budgets.
Problem lift(const Vector& p, const std::vector<Matrix>& tables, const std::vector<double>& budgets) {
    Problem prob;
    prob.p = p;
    prob.nt = 1;
    for (const auto& t : tables) prob.nt *= t.cols();
    for (std::size_t c = 0; c < tables.size(); ++c) {
        if (!std::isfinite(budgets[c])) continue;
        Matrix lifted(p.size(), prob.nt);
        for (Eigen::Index col = 0; col < prob.nt; ++col) {
            Eigen::Index rem = col;
            Eigen::Index digit = 0;
            for (std::size_t k = tables.size(); k-- > 0;) {
                const Eigen::Index d = rem % tables[k].cols();
                rem /= tables[k].cols();
                if (k == c) digit = d;
            }
            lifted.col(col) = tables[c].col(digit);
        }
        prob.tables.push_back(std::move(lifted));
        prob.budgets.push_back(budgets[c]);
    }
    return prob;
}

double rate_of(const Vector& p, const Matrix& q) {
    const Vector r = q.transpose() * p;
    double acc = 0.0;
    for (Eigen::Index x = 0; x < q.rows(); ++x)
        for (Eigen::Index j = 0; j < q.cols(); ++j)
            if (q(x, j) > 0.0) acc += p(x) * q(x, j) * std::log(q(x, j) / r(j));
    return acc;
}

double distortion_of(const Vector& p, const Matrix& table, const Matrix& q) {
    return (p.asDiagonal() * q.cwiseProduct(table)).sum();
}

void compositions(int remaining, std::size_t slot, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (slot + 1 == cur.size()) {
        cur[slot] = remaining;
        out.push_back(cur);
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        cur[slot] = v;
        compositions(remaining - v, slot + 1, cur, out);
    }
}

double binomial(int n, int k) {
    double acc = 1.0;
    for (int i = 1; i <= k; ++i) acc = acc * static_cast<double>(n - k + i) / static_cast<double>(i);
    return acc;
}

// Primal log-barrier Newton on q with row-sum equalities:
//   min t I(q) - sum log q - sum_c log(b_c - D_c(q)).
double barrier_refine(const Problem& prob, Matrix q) {
    const Eigen::Index nx = prob.p.size();
    const Eigen::Index nt = prob.nt;
    const Eigen::Index n = nx * nt;
    const std::size_t nc = prob.tables.size();
    auto idx = [nt](Eigen::Index x, Eigen::Index j) { return x * nt + j; };

    std::vector<Vector> a(nc, Vector(n));
    for (std::size_t c = 0; c < nc; ++c)
        for (Eigen::Index x = 0; x < nx; ++x)
            for (Eigen::Index j = 0; j < nt; ++j) a[c](idx(x, j)) = prob.p(x) * prob.tables[c](x, j);

    auto flat = [&](const Matrix& m) {
        Vector v(n);
        for (Eigen::Index x = 0; x < nx; ++x)
            for (Eigen::Index j = 0; j < nt; ++j) v(idx(x, j)) = m(x, j);
        return v;
    };
    auto unflat = [&](const Vector& v) {
        Matrix m(nx, nt);
        for (Eigen::Index x = 0; x < nx; ++x)
            for (Eigen::Index j = 0; j < nt; ++j) m(x, j) = v(idx(x, j));
        return m;
    };
    auto objective = [&](const Vector& v, double t, double& out) {
        for (Eigen::Index i = 0; i < n; ++i)
            if (!(v(i) > 0.0)) return false;
        double val = t * rate_of(prob.p, unflat(v));
        for (Eigen::Index i = 0; i < n; ++i) val -= std::log(v(i));
        for (std::size_t c = 0; c < nc; ++c) {
            const double s = prob.budgets[c] - a[c].dot(v);
            if (!(s > 0.0)) return false;
            val -= std::log(s);
        }
        out = val;
        return true;
    };

    Vector v = flat(q);
    const double nu = static_cast<double>(n + static_cast<Eigen::Index>(nc));
    // Null-space basis of the row-sum constraints: moving mass from the last
    // reproduction symbol of a row to another one.
    Matrix basis = Matrix::Zero(n, nx * (nt - 1));
    for (Eigen::Index x = 0; x < nx; ++x)
        for (Eigen::Index j = 0; j + 1 < nt; ++j) {
            basis(idx(x, j), x * (nt - 1) + j) = 1.0;
            basis(idx(x, nt - 1), x * (nt - 1) + j) = -1.0;
        }

    for (double t = 1.0; nu / t > 1e-11; t *= 10.0) {
        for (int newton = 0; newton < 200; ++newton) {
            const Matrix qm = unflat(v);
            const Vector r = qm.transpose() * prob.p;
            Vector grad(n);
            Matrix hess = Matrix::Zero(n, n);
            for (Eigen::Index x = 0; x < nx; ++x)
                for (Eigen::Index j = 0; j < nt; ++j) {
                    const Eigen::Index i = idx(x, j);
                    grad(i) = t * prob.p(x) * std::log(qm(x, j) / r(j)) - 1.0 / v(i);
                    hess(i, i) += t * prob.p(x) / v(i) + 1.0 / (v(i) * v(i));
                    for (Eigen::Index y = 0; y < nx; ++y) hess(i, idx(y, j)) -= t * prob.p(x) * prob.p(y) / r(j);
                }
            for (std::size_t c = 0; c < nc; ++c) {
                const double s = prob.budgets[c] - a[c].dot(v);
                grad += a[c] / s;
                hess += a[c] * a[c].transpose() / (s * s);
            }
            const Matrix hr = basis.transpose() * hess * basis;
            const Vector gr = basis.transpose() * grad;
            const Eigen::LDLT<Matrix> ldlt(hr);
            const Vector w = ldlt.info() == Eigen::Success ? Vector(ldlt.solve(-gr)) : Vector(hr.fullPivLu().solve(-gr));
            const Vector step = basis * w;
            const double decrement = -grad.dot(step);
            if (!(decrement > 1e-13)) break;
            double f0 = 0.0;
            if (!objective(v, t, f0)) break;
            double s = 1.0;
            double f1 = 0.0;
            while (s > 1e-14 && !(objective(v + s * step, t, f1) && f1 <= f0 - 0.25 * s * decrement)) s *= 0.5;
            if (s <= 1e-14) break;
            v += s * step;
        }
    }
    for (Eigen::Index x = 0; x < nx; ++x) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < nt; ++j) sum += v(idx(x, j));
        for (Eigen::Index j = 0; j < nt; ++j) v(idx(x, j)) /= sum;
    }
    const Matrix result = unflat(v);
    for (std::size_t c = 0; c < nc; ++c)
        if (distortion_of(prob.p, prob.tables[c], result) > prob.budgets[c] + 1e-9) return kInf;
    return rate_of(prob.p, result);
}

double grid_oracle(const Problem& prob, int grid_steps) {
    const Eigen::Index nx = prob.p.size();
    const Eigen::Index nt = prob.nt;
    if (nx * nt > 16) throw Error(Errc::TooLarge, "oracle needs |X| |S^| |X^| <= 16");
    if (grid_steps < 1 || grid_steps > 20) throw Error(Errc::TooLarge, "oracle needs 1 <= grid_steps <= 20");
    const double per_row = binomial(grid_steps + static_cast<int>(nt) - 1, static_cast<int>(nt) - 1);
    if (std::pow(per_row, static_cast<double>(nx)) > kMaxGridPoints)
        throw Error(Errc::TooLarge, "simplex grid too large; lower grid_steps");

    std::vector<std::vector<int>> comps;
    std::vector<int> cur(static_cast<std::size_t>(nt));
    compositions(grid_steps, 0, cur, comps);
    const std::size_t nrow = comps.size();
    const std::size_t nc = prob.tables.size();
    const double inv = 1.0 / grid_steps;

    // Per-row, per-grid-point contributions.
    std::vector<std::vector<double>> neg_ent(static_cast<std::size_t>(nx), std::vector<double>(nrow));
    std::vector<std::vector<std::vector<double>>> dist(
        nc, std::vector<std::vector<double>>(static_cast<std::size_t>(nx), std::vector<double>(nrow)));
    for (Eigen::Index x = 0; x < nx; ++x)
        for (std::size_t i = 0; i < nrow; ++i) {
            double acc = 0.0;
            for (Eigen::Index j = 0; j < nt; ++j) {
                const double v = comps[i][static_cast<std::size_t>(j)] * inv;
                if (v > 0.0) acc += v * std::log(v);
            }
            neg_ent[x][i] = prob.p(x) * acc;
            for (std::size_t c = 0; c < nc; ++c) {
                double d = 0.0;
                for (Eigen::Index j = 0; j < nt; ++j) d += comps[i][static_cast<std::size_t>(j)] * inv * prob.tables[c](x, j);
                dist[c][x][i] = prob.p(x) * d;
            }
        }

    std::vector<std::size_t> pick(static_cast<std::size_t>(nx), 0);
    double best = kInf;
    double best_slack = -kInf;
    std::vector<std::size_t> interior_pick;
    Vector r(nt);
    while (true) {
        bool feasible = true;
        double slack = kInf;
        for (std::size_t c = 0; c < nc && feasible; ++c) {
            double d = 0.0;
            for (Eigen::Index x = 0; x < nx; ++x) d += dist[c][x][pick[x]];
            const double s = prob.budgets[c] - d;
            if (s < -1e-12) feasible = false;
            slack = std::min(slack, s);
        }
        if (feasible) {
            r.setZero();
            double val = 0.0;
            for (Eigen::Index x = 0; x < nx; ++x) {
                val += neg_ent[x][pick[x]];
                for (Eigen::Index j = 0; j < nt; ++j) r(j) += prob.p(x) * comps[pick[x]][static_cast<std::size_t>(j)] * inv;
            }
            for (Eigen::Index j = 0; j < nt; ++j)
                if (r(j) > 0.0) val -= r(j) * std::log(r(j));
            best = std::min(best, std::max(val, 0.0));
            if (slack > best_slack) {
                best_slack = slack;
                interior_pick = pick;
            }
        }
        std::size_t pos = 0;
        while (pos < pick.size() && ++pick[pos] == nrow) pick[pos++] = 0;
        if (pos == pick.size()) break;
    }

    if (!(best_slack > 0.0)) return best;
    if (!std::isfinite(best_slack)) return best;  // no finite budgets: rate 0 sits on the grid

    // Strictly interior start: mix the most interior grid point with the
    // uniform conditional.
    Matrix q0(nx, nt);
    for (Eigen::Index x = 0; x < nx; ++x)
        for (Eigen::Index j = 0; j < nt; ++j) q0(x, j) = comps[interior_pick[x]][static_cast<std::size_t>(j)] * inv;
    const Matrix uniform = Matrix::Constant(nx, nt, 1.0 / static_cast<double>(nt));
    double eta = 0.5;
    for (std::size_t c = 0; c < nc; ++c) {
        const double rise = distortion_of(prob.p, prob.tables[c], uniform) - distortion_of(prob.p, prob.tables[c], q0);
        if (rise > 0.0) eta = std::min(eta, 0.5 * best_slack / rise);
    }
    const Matrix start = (1.0 - eta) * q0 + eta * uniform;
    return std::min(best, barrier_refine(prob, start));
}

}  // namespace

double exhaustive_discrete_oracle_multi(const MultiStateDiscreteSource& source, const MultiBudget& budget,
                                        int grid_steps) {
    validate_budget(budget);
    if (budget.D_s.size() != source.num_states())
        throw Error(Errc::DimensionMismatch, "one state budget per intrinsic state is required");
    std::vector<Matrix> tables;
    std::vector<double> budgets;
    for (std::size_t j = 0; j < source.num_states(); ++j) {
        const DiscreteSemanticSource& st = source.states()[j];
        // Reduced distortion written out directly from p(s, x).
        Matrix reduced = Matrix::Zero(static_cast<Eigen::Index>(st.obs_size()), static_cast<Eigen::Index>(st.state_repro_size()));
        for (Eigen::Index x = 0; x < reduced.rows(); ++x)
            for (Eigen::Index a = 0; a < reduced.cols(); ++a)
                for (Eigen::Index s = 0; s < st.joint_pmf().rows(); ++s)
                    reduced(x, a) += st.joint_pmf()(s, x) / st.obs_marginal()(x) * st.state_distortion()(s, a);
        tables.push_back(std::move(reduced));
        budgets.push_back(budget.D_s[j]);
    }
    tables.push_back(source.obs_distortion());
    budgets.push_back(budget.D_o);
    return grid_oracle(lift(source.obs_marginal(), tables, budgets), grid_steps);
}

double exhaustive_discrete_oracle(const DiscreteSemanticSource& source, const DistortionBudget& budget, int grid_steps) {
    return exhaustive_discrete_oracle_multi(MultiStateDiscreteSource::from_single(source), {{budget.D_s}, budget.D_o},
                                            grid_steps);
}

BlockIdentity block_distortion_identity_check(const DiscreteSemanticSource& source, const BlockEncoder& encoder) {
    const int n = encoder.n;
    if (n < 1 || n > 3) throw Error(Errc::InvalidArgument, "block length must be 1, 2 or 3");
    const auto ns = static_cast<std::uint32_t>(source.state_size());
    const auto nx = static_cast<std::uint32_t>(source.obs_size());
    const auto nr = static_cast<std::uint32_t>(source.state_repro_size());
    std::uint32_t nx_n = 1, ns_n = 1, nr_n = 1;
    for (int i = 0; i < n; ++i) {
        nx_n *= nx;
        ns_n *= ns;
        nr_n *= nr;
    }
    if (encoder.state_repro.size() != nx_n)
        throw Error(Errc::DimensionMismatch, "encoder must map every x^n to a reproduction");
    for (auto v : encoder.state_repro)
        if (v >= nr_n) throw Error(Errc::DimensionMismatch, "encoder output out of range");

    const Matrix& joint = source.joint_pmf();
    const Matrix& d_s = source.state_distortion();
    const Matrix reduced = reduce_state_distortion(source).table;
    const Vector& p_x = source.obs_marginal();
    auto digit = [](std::uint32_t index, std::uint32_t base, int pos) {
        for (int i = 0; i < pos; ++i) index /= base;
        return index % base;
    };

    BlockIdentity out;
    for (std::uint32_t xs = 0; xs < nx_n; ++xs) {
        const std::uint32_t shat = encoder.state_repro[xs];
        // rhs: p(x^n) (1/n) sum_i d^_s(x_i, s^_i)
        double px = 1.0;
        double dhat = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto x = digit(xs, nx, i);
            px *= p_x(x);
            dhat += reduced(x, digit(shat, nr, i));
        }
        out.rhs += px * dhat / n;
        // lhs: sum over s^n of p(s^n, x^n) (1/n) sum_i d_s(s_i, s^_i)
        for (std::uint32_t ss = 0; ss < ns_n; ++ss) {
            double pj = 1.0;
            double d = 0.0;
            for (int i = 0; i < n; ++i) {
                const auto s = digit(ss, ns, i);
                const auto x = digit(xs, nx, i);
                pj *= joint(s, x);
                d += d_s(s, digit(shat, nr, i));
            }
            out.lhs += pj * d / n;
        }
    }
    return out;
}

}  // namespace semrd
