#include "semrd/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <string>

namespace semrd {

ReducedDistortion reduce_state_distortion(const DiscreteSemanticSource& source) {
    // p(s|x)^T d_s : |X| x |S^|
    return {source.state_given_obs().transpose() * source.state_distortion()};
}

std::pair<double, double> minimal_distortions(const DiscreteSemanticSource& source) {
    const Vector& p = source.obs_marginal();
    const Matrix reduced = reduce_state_distortion(source).table;
    const Matrix& d_o = source.obs_distortion();
    double ds = 0.0;
    double dob = 0.0;
    for (Eigen::Index x = 0; x < p.size(); ++x) {
        ds += p(x) * reduced.row(x).minCoeff();
        dob += p(x) * d_o.row(x).minCoeff();
    }
    return {ds, dob};
}

namespace {

// One constrained distortion: a table over (x, a) and its budget.
struct Component {
    Matrix table;  // |X| x |A|
    double budget = kInf;
    std::string name;
};

struct BlahutArimoto {
    Vector r;   // output marginal over the joint active alphabet
    Matrix q;   // |X| x J
    double rate = 0.0;
    double lower = 0.0;  // certified lower bound on min_q I + E[d]
    long iterations = 0;
    bool converged = false;
};

// Minimizes I(X; T) + E[d(X, T)] over q(t|x), warm-started from `r`.
BlahutArimoto run_blahut_arimoto(const Vector& p, const Matrix& d, Vector r, const DiscreteSolverOptions& opts) {
    const Eigen::Index nx = d.rows();
    const Eigen::Index nt = d.cols();
    if (r.size() != nt) r = Vector::Constant(nt, 1.0 / static_cast<double>(nt));

    // Row shifts cancel in the per-x normalization.
    Matrix e(nx, nt);
    Vector shift(nx);
    for (Eigen::Index x = 0; x < nx; ++x) {
        shift(x) = d.row(x).minCoeff();
        e.row(x) = (-(d.row(x).array() - shift(x))).exp();
    }

    BlahutArimoto out;
    Vector z(nx);
    Vector c(nt);
    Vector w(nx);
    for (int it = 0; it < opts.ba_max_iterations; ++it) {
        z.noalias() = e * r;
        w = p.cwiseQuotient(z);
        c.noalias() = e.transpose() * w;
        ++out.iterations;
        if (it % 8 == 0 || it + 1 == opts.ba_max_iterations) {
            // Upper minus lower bound on the Lagrangian.
            double avg = 0.0;
            for (Eigen::Index j = 0; j < nt; ++j)
                if (r(j) > 0.0) avg += r(j) * std::log(c(j));
            const double gap = std::log(c.maxCoeff()) - avg;
            if (gap < opts.ba_gap_tol) {
                out.converged = true;
                break;
            }
        }
        r = r.cwiseProduct(c);
        r /= r.sum();
        // Keeps every e * r strictly positive when exp underflows at large multipliers.
        r = r.cwiseMax(1e-300);
    }

    z.noalias() = e * r;
    w = p.cwiseQuotient(z);
    c.noalias() = e.transpose() * w;
    out.lower = -std::log(c.maxCoeff());
    for (Eigen::Index x = 0; x < nx; ++x) out.lower += p(x) * (shift(x) - std::log(z(x)));
    out.q.resize(nx, nt);
    for (Eigen::Index x = 0; x < nx; ++x) out.q.row(x) = (r.transpose().array() * e.row(x).array()) / z(x);
    out.r = r;
    return out;
}

double mutual_information(const Vector& p, const Matrix& q) {
    const Vector marginal = q.transpose() * p;
    double rate = 0.0;
    for (Eigen::Index x = 0; x < q.rows(); ++x)
        for (Eigen::Index j = 0; j < q.cols(); ++j) {
            const double v = q(x, j);
            if (v > 0.0 && marginal(j) > 0.0) rate += p(x) * v * std::log(v / marginal(j));
        }
    return std::max(rate, 0.0);
}

// Evaluation of the dual at one multiplier vector. Components with a zero
// multiplier take the Bayes-optimal deterministic reproduction given the
// active ones, which is the limit of the Lagrangian minimizer as that
// multiplier tends to zero from above.
struct Evaluation {
    std::vector<double> achieved;
    double rate = 0.0;
    double lagrangian_lower = 0.0;            // lower bound on min I + sum lambda E[d]
    Matrix q_active;                          // |X| x J_active
    std::vector<Eigen::Index> active;         // components in the joint alphabet
    std::vector<std::vector<Eigen::Index>> maps;  // per component: t -> symbol
    long iterations = 0;
    bool converged = true;
};

class DualEngine {
public:
    DualEngine(Vector p, std::vector<Component> comps, DiscreteSolverOptions opts)
        : p_(std::move(p)), comps_(std::move(comps)), opts_(opts) {}

    Evaluation evaluate(const std::vector<double>& lambda) {
        Evaluation ev;
        std::uint64_t mask = 0;
        for (std::size_t c = 0; c < comps_.size(); ++c)
            if (lambda[c] > 0.0) {
                ev.active.push_back(static_cast<Eigen::Index>(c));
                mask |= (std::uint64_t{1} << c);
            }
        const Eigen::Index nx = p_.size();

        // Joint alphabet of the active components, last one fastest.
        Eigen::Index nt = 1;
        for (auto c : ev.active) nt *= comps_[c].table.cols();
        std::vector<std::vector<Eigen::Index>> digits(ev.active.size(), std::vector<Eigen::Index>(nt));
        for (Eigen::Index t = 0; t < nt; ++t) {
            Eigen::Index rem = t;
            for (std::size_t k = ev.active.size(); k-- > 0;) {
                const Eigen::Index size = comps_[ev.active[k]].table.cols();
                digits[k][t] = rem % size;
                rem /= size;
            }
        }

        if (ev.active.empty()) {
            ev.q_active = Matrix::Ones(nx, 1);
            ev.rate = 0.0;
        } else {
            Matrix d = Matrix::Zero(nx, nt);
            for (std::size_t k = 0; k < ev.active.size(); ++k) {
                const auto& comp = comps_[ev.active[k]];
                const double lam = lambda[ev.active[k]];
                for (Eigen::Index t = 0; t < nt; ++t) d.col(t) += lam * comp.table.col(digits[k][t]);
            }
            auto ba = run_blahut_arimoto(p_, d, warm_[mask], opts_);
            warm_[mask] = ba.r;
            ev.q_active = std::move(ba.q);
            ev.iterations = ba.iterations;
            ev.converged = ba.converged;
            ev.lagrangian_lower = ba.lower;
            ev.rate = mutual_information(p_, ev.q_active);
        }

        // Joint law of (X, T): weights for the Bayes maps and the distortions.
        ev.maps.assign(comps_.size(), std::vector<Eigen::Index>(nt, 0));
        ev.achieved.assign(comps_.size(), 0.0);
        for (std::size_t k = 0; k < ev.active.size(); ++k) ev.maps[ev.active[k]] = digits[k];
        for (std::size_t c = 0; c < comps_.size(); ++c) {
            const Matrix& table = comps_[c].table;
            const bool is_active = lambda[c] > 0.0;
            double total = 0.0;
            for (Eigen::Index t = 0; t < nt; ++t) {
                Vector weight = p_.cwiseProduct(ev.q_active.col(t));  // p(x) q(t|x)
                if (!is_active) {
                    Eigen::Index best = 0;
                    (table.transpose() * weight).minCoeff(&best);
                    ev.maps[c][t] = best;
                }
                total += weight.dot(table.col(ev.maps[c][t]));
            }
            ev.achieved[c] = total;
        }
        return ev;
    }

    [[nodiscard]] const std::vector<Component>& components() const { return comps_; }
    [[nodiscard]] const Vector& p() const { return p_; }

private:
    Vector p_;
    std::vector<Component> comps_;
    DiscreteSolverOptions opts_;
    std::map<std::uint64_t, Vector> warm_;
};

// Smallest positive gap between two entries of the same row. Differences
// at rounding level count as ties.
double min_positive_gap(const Matrix& table) {
    const double floor = 1e-9 * std::max(1.0, table.cwiseAbs().maxCoeff());
    double gap = kInf;
    for (Eigen::Index x = 0; x < table.rows(); ++x) {
        std::vector<double> row(static_cast<std::size_t>(table.cols()));
        for (Eigen::Index a = 0; a < table.cols(); ++a) row[static_cast<std::size_t>(a)] = table(x, a);
        std::sort(row.begin(), row.end());
        for (std::size_t i = 1; i < row.size(); ++i) {
            const double g = row[i] - row[i - 1];
            if (g > floor) gap = std::min(gap, g);
        }
    }
    return gap;
}

struct EngineResult {
    Evaluation eval;
    std::vector<double> lambda;
    long iterations = 0;
    bool converged = false;
    double violation = 0.0;
};

// Cutting-plane model over evaluated points i with rate R_i and distortions
// d_i:  min sum_i theta_i R_i + sum_c M_c v_c  s.t.  sum_i theta_i d_ci - v_c <= D_c,
// sum_i theta_i = 1, theta, v >= 0. The elastic v keeps it feasible. Solved by
// revised simplex with Bland's rule from the basis {theta_0, s or v per row}.
struct MasterLp {
    std::vector<double> theta;
    std::vector<double> lambda;  // duals of the distortion rows, in [0, M_c]
    double value = 0.0;
    double elastic = 0.0;        // sum of v at the optimum
};

MasterLp solve_master(const std::vector<double>& rate, const std::vector<std::vector<double>>& dist,
                      const std::vector<double>& budget, const std::vector<double>& penalty) {
    const std::size_t n = rate.size();
    const std::size_t k = budget.size();
    const auto m = static_cast<Eigen::Index>(k + 1);
    // Columns: theta_i (n), s_c (k), v_c (k).
    const std::size_t ncol = n + 2 * k;
    auto column = [&](std::size_t j) {
        Vector a = Vector::Zero(m);
        if (j < n) {
            for (std::size_t c = 0; c < k; ++c) a(static_cast<Eigen::Index>(c)) = dist[j][c];
            a(m - 1) = 1.0;
        } else if (j < n + k) {
            a(static_cast<Eigen::Index>(j - n)) = 1.0;
        } else {
            a(static_cast<Eigen::Index>(j - n - k)) = -1.0;
        }
        return a;
    };
    auto cost = [&](std::size_t j) { return j < n ? rate[j] : (j < n + k ? 0.0 : penalty[j - n - k]); };
    Vector b(m);
    for (std::size_t c = 0; c < k; ++c) b(static_cast<Eigen::Index>(c)) = budget[c];
    b(m - 1) = 1.0;

    std::vector<std::size_t> basis(k + 1);
    for (std::size_t c = 0; c < k; ++c) basis[c] = dist[0][c] <= budget[c] ? n + c : n + k + c;
    basis[k] = 0;

    Vector x_b;
    Vector y;
    for (int it = 0; it < 10000; ++it) {
        Matrix B(m, m);
        Vector c_b(m);
        for (Eigen::Index r = 0; r < m; ++r) {
            B.col(r) = column(basis[static_cast<std::size_t>(r)]);
            c_b(r) = cost(basis[static_cast<std::size_t>(r)]);
        }
        const Eigen::FullPivLU<Matrix> lu(B);
        x_b = lu.solve(b);
        y = lu.transpose().solve(c_b);
        std::size_t enter = ncol;
        for (std::size_t j = 0; j < ncol; ++j) {
            if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
            if (cost(j) - y.dot(column(j)) < -1e-12 * (1.0 + std::abs(cost(j)))) {
                enter = j;
                break;
            }
        }
        if (enter == ncol) break;
        const Vector dir = lu.solve(column(enter));
        Eigen::Index leave = -1;
        double best = kInf;
        for (Eigen::Index r = 0; r < m; ++r)
            if (dir(r) > 1e-12) {
                const double ratio = std::max(0.0, x_b(r)) / dir(r);
                if (ratio < best - 1e-15 ||
                    (ratio <= best + 1e-15 && leave >= 0 && basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
                    best = ratio;
                    leave = r;
                }
            }
        if (leave < 0) break;  // unbounded cannot happen with theta summing to one
        basis[static_cast<std::size_t>(leave)] = enter;
    }

    MasterLp out;
    out.theta.assign(n, 0.0);
    for (Eigen::Index r = 0; r < m; ++r) {
        const std::size_t j = basis[static_cast<std::size_t>(r)];
        const double v = std::max(0.0, x_b(r));
        if (j < n) out.theta[j] = v;
        else if (j >= n + k) out.elastic += v;
        out.value += cost(j) * v;
    }
    for (std::size_t c = 0; c < k; ++c) out.lambda.push_back(std::clamp(-y(static_cast<Eigen::Index>(c)), 0.0, penalty[c]));
    return out;
}

// Time-shared conditional sum_i theta_i q_i written on the full product
// alphabet, so that expand_conditional can treat it as one evaluation.
Evaluation mix_evaluations(const std::vector<Evaluation>& points, const std::vector<double>& theta,
                           const std::vector<Component>& comps, const Vector& p) {
    const Eigen::Index nx = p.size();
    Eigen::Index total = 1;
    for (const auto& c : comps) total *= c.table.cols();
    Evaluation out;
    out.q_active = Matrix::Zero(nx, total);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(theta[i] > 0.0)) continue;
        const Evaluation& ev = points[i];
        for (Eigen::Index t = 0; t < ev.q_active.cols(); ++t) {
            Eigen::Index index = 0;
            for (std::size_t c = 0; c < comps.size(); ++c) index = index * comps[c].table.cols() + ev.maps[c][t];
            out.q_active.col(index) += theta[i] * ev.q_active.col(t);
        }
        out.iterations += ev.iterations;
        out.converged = out.converged && ev.converged;
    }
    out.maps.assign(comps.size(), std::vector<Eigen::Index>(static_cast<std::size_t>(total)));
    for (Eigen::Index t = 0; t < total; ++t) {
        Eigen::Index rem = t;
        for (std::size_t c = comps.size(); c-- > 0;) {
            out.maps[c][static_cast<std::size_t>(t)] = rem % comps[c].table.cols();
            rem /= comps[c].table.cols();
        }
    }
    for (std::size_t c = 0; c < comps.size(); ++c) out.active.push_back(static_cast<Eigen::Index>(c));
    out.rate = mutual_information(p, out.q_active);
    out.achieved.assign(comps.size(), 0.0);
    for (Eigen::Index t = 0; t < total; ++t) {
        const Vector weight = p.cwiseProduct(out.q_active.col(t));
        for (std::size_t c = 0; c < comps.size(); ++c)
            out.achieved[c] += weight.dot(comps[c].table.col(out.maps[c][static_cast<std::size_t>(t)]));
    }
    return out;
}

EngineResult solve_engine(DualEngine& engine, const DiscreteSolverOptions& opts) {
    const auto& comps = engine.components();
    const std::size_t k = comps.size();
    const Vector& p = engine.p();

    std::vector<double> minimal(k, 0.0);
    std::string violated;
    for (std::size_t c = 0; c < k; ++c) {
        for (Eigen::Index x = 0; x < p.size(); ++x) minimal[c] += p(x) * comps[c].table.row(x).minCoeff();
        if (comps[c].budget < minimal[c] - 1e-12) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s%s below the minimal achievable %.12g", violated.empty() ? "" : "; ",
                          comps[c].name.c_str(), minimal[c]);
            violated += buf;
        }
    }
    if (!violated.empty()) throw InfeasibleDistortion(violated, minimal);

    std::vector<double> lambda_max(k);
    for (std::size_t c = 0; c < k; ++c) {
        const double gap = min_positive_gap(comps[c].table);
        lambda_max[c] = std::isfinite(gap) ? 50.0 / gap : 50.0;
    }

    EngineResult res;
    res.lambda.assign(k, 0.0);
    auto tally = [&](const Evaluation& ev) {
        res.iterations += ev.iterations;
        return ev;
    };

    auto violation = [&](const Evaluation& ev, const std::vector<double>& lam) {
        double worst = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (!std::isfinite(comps[c].budget)) continue;
            const double f = ev.achieved[c] - comps[c].budget;
            if (std::isnan(f)) return kInf;
            if (lam[c] > 0.0 && lam[c] < lambda_max[c]) worst = std::max(worst, std::abs(f));
            else worst = std::max(worst, f);
        }
        return worst;
    };

    Evaluation current = tally(engine.evaluate(res.lambda));
    double before = kInf;
    for (int round = 0; round < opts.outer_max_rounds && violation(current, res.lambda) > opts.outer_tol; ++round) {
        // A full round without progress: inner noise is above outer_tol.
        const double now = violation(current, res.lambda);
        if (round >= 2 && now > 0.9 * before) break;
        before = now;
        for (std::size_t c = 0; c < k; ++c) {
            if (!std::isfinite(comps[c].budget)) continue;
            const double budget = comps[c].budget;
            auto lam = res.lambda;
            auto f = [&](double value, Evaluation& ev) {
                lam[c] = value;
                ev = tally(engine.evaluate(lam));
                return ev.achieved[c] - budget;
            };
            Evaluation ev_lo;
            const double f0 = f(0.0, ev_lo);
            if (f0 <= opts.outer_tol) {
                res.lambda[c] = 0.0;
                current = std::move(ev_lo);
                continue;
            }
            Evaluation ev_hi;
            double hi = std::max(res.lambda[c], 1e-3 * lambda_max[c]);
            double f_hi = f(hi, ev_hi);
            while (f_hi > 0.0 && hi < lambda_max[c]) {
                hi = std::min(lambda_max[c], hi * 4.0);
                f_hi = f(hi, ev_hi);
            }
            if (f_hi > 0.0) {  // budget only reachable in the limit
                res.lambda[c] = hi;
                current = std::move(ev_hi);
                continue;
            }
            // Illinois regula falsi on the decreasing map lambda -> E[d_c].
            double lo = 0.0;
            double f_lo = f0;
            int side = 0;
            Evaluation ev_mid = ev_hi;
            double mid = hi;
            double f_mid = f_hi;
            for (int it = 0; it < 200 && std::abs(f_mid) > 0.25 * opts.outer_tol; ++it) {
                mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
                if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
                f_mid = f(mid, ev_mid);
                if (f_mid > 0.0) {
                    lo = mid;
                    f_lo = f_mid;
                    if (side == 1) f_hi *= 0.5;
                    side = 1;
                } else {
                    hi = mid;
                    f_hi = f_mid;
                    if (side == -1) f_lo *= 0.5;
                    side = -1;
                }
                if (hi - lo <= 1e-15 * hi) break;
            }
            res.lambda[c] = mid;
            current = std::move(ev_mid);
        }

        // Newton polish on the currently active multipliers once the
        // coordinate sweep is close.
        std::vector<std::size_t> act;
        for (std::size_t c = 0; c < k; ++c)
            if (res.lambda[c] > 0.0 && res.lambda[c] < lambda_max[c] && std::isfinite(comps[c].budget)) act.push_back(c);
        if (act.size() >= 2 && violation(current, res.lambda) < 1e-3) {
            const auto na = static_cast<Eigen::Index>(act.size());
            for (int newton = 0; newton < 8 && violation(current, res.lambda) > opts.outer_tol; ++newton) {
                Vector resid(na);
                for (Eigen::Index i = 0; i < na; ++i) resid(i) = current.achieved[act[i]] - comps[act[i]].budget;
                Matrix jac(na, na);
                for (Eigen::Index j = 0; j < na; ++j) {
                    auto lam = res.lambda;
                    const double h = 1e-5 * std::max(1.0, lam[act[j]]);
                    lam[act[j]] += h;
                    auto up = tally(engine.evaluate(lam));
                    lam[act[j]] -= 2.0 * h;
                    if (lam[act[j]] <= 0.0) lam[act[j]] = 0.5 * res.lambda[act[j]];
                    const double lo_val = lam[act[j]];
                    auto dn = tally(engine.evaluate(lam));
                    for (Eigen::Index i = 0; i < na; ++i)
                        jac(i, j) = (up.achieved[act[i]] - dn.achieved[act[i]]) / (res.lambda[act[j]] + h - lo_val);
                }
                Eigen::FullPivLU<Matrix> lu(jac);
                if (lu.rank() < na) break;
                Vector step = lu.solve(-resid);
                auto lam = res.lambda;
                bool ok = true;
                for (Eigen::Index i = 0; i < na; ++i) {
                    lam[act[i]] += step(i);
                    if (!(lam[act[i]] > 0.0)) ok = false;
                }
                if (!ok) break;
                auto trial = tally(engine.evaluate(lam));
                if (violation(trial, lam) >= violation(current, res.lambda)) break;
                res.lambda = lam;
                current = std::move(trial);
            }
        }
    }

    res.violation = violation(current, res.lambda);

    if (res.violation > opts.outer_tol) {
        // Cutting planes on the dual, time-sharing between the evaluated
        // conditionals. Catches budgets that sit inside a jump of the
        // achieved distortion (flat pieces of the rate curve), where no
        // single multiplier meets them.
        std::vector<std::size_t> finite;
        std::vector<double> budgets;
        std::vector<double> penalty;
        for (std::size_t c = 0; c < k; ++c)
            if (std::isfinite(comps[c].budget)) {
                finite.push_back(c);
                budgets.push_back(comps[c].budget);
                penalty.push_back(lambda_max[c]);
            }
        std::vector<Evaluation> points;
        std::vector<double> rates;
        std::vector<std::vector<double>> dists;
        double lower = -kInf;
        auto add = [&](const std::vector<double>& lam, Evaluation ev) {
            double g = ev.lagrangian_lower;
            std::vector<double> d;
            for (const std::size_t c : finite) {
                g -= lam[c] * comps[c].budget;
                d.push_back(ev.achieved[c]);
            }
            lower = std::max(lower, g);
            rates.push_back(ev.rate);
            dists.push_back(std::move(d));
            points.push_back(std::move(ev));
        };
        add(res.lambda, current);
        add(std::vector<double>(k, 0.0), tally(engine.evaluate(std::vector<double>(k, 0.0))));
        const double rate_tol = std::max(1e-9, 100.0 * opts.ba_gap_tol);
        MasterLp lp = solve_master(rates, dists, budgets, penalty);
        for (int it = 0; it < 200 && !(lp.elastic <= 1e-12 && lp.value - lower <= rate_tol); ++it) {
            std::vector<double> lam(k, 0.0);
            for (std::size_t i = 0; i < finite.size(); ++i) lam[finite[i]] = lp.lambda[i];
            add(lam, tally(engine.evaluate(lam)));
            lp = solve_master(rates, dists, budgets, penalty);
        }
        if (lp.elastic <= 1e-12) {
            Evaluation mixed = mix_evaluations(points, lp.theta, comps, p);
            // The bound gap certifies the mixture on its own.
            mixed.converged = lp.value - lower <= rate_tol;
            std::vector<double> lam(k, 0.0);
            for (std::size_t i = 0; i < finite.size(); ++i) lam[finite[i]] = lp.lambda[i] > 1e-12 ? lp.lambda[i] : 0.0;
            const double v = violation(mixed, lam);
            if (v < res.violation) {
                res.lambda = std::move(lam);
                res.violation = v;
                current = std::move(mixed);
            }
        }
    }
    res.converged = res.violation <= opts.outer_tol;
    res.eval = std::move(current);
    return res;
}

// Expands the compact active-alphabet solution onto the full product of all
// component alphabets (component order, last fastest).
Matrix expand_conditional(const EngineResult& res, const std::vector<Component>& comps) {
    const auto& ev = res.eval;
    const Eigen::Index nx = ev.q_active.rows();
    Eigen::Index total = 1;
    for (const auto& c : comps) total *= c.table.cols();
    Matrix q = Matrix::Zero(nx, total);
    for (Eigen::Index t = 0; t < ev.q_active.cols(); ++t) {
        Eigen::Index index = 0;
        for (std::size_t c = 0; c < comps.size(); ++c) index = index * comps[c].table.cols() + ev.maps[c][t];
        q.col(index) += ev.q_active.col(t);
    }
    return q;
}

DiscreteRdfSolution package(const EngineResult& res, const std::vector<Component>& comps, std::size_t num_states,
                            const DiscreteSolverOptions& opts) {
    if (!res.converged) {
        char buf[240];
        std::snprintf(buf, sizeof buf,
                      "multiplier search stopped %.3g away from the budgets (outer_tol %.3g)%s", res.violation,
                      opts.outer_tol,
                      res.eval.converged ? "" : "; Blahut-Arimoto hit its iteration cap, loosen ba_gap_tol or outer_tol");
        throw Error(Errc::MaxIterationsExceeded, buf);
    }
    DiscreteRdfSolution sol;
    sol.rate = res.eval.rate;
    sol.conditional_pmf = expand_conditional(res, comps);
    for (std::size_t j = 0; j < num_states; ++j) {
        sol.achieved_Ds.push_back(res.eval.achieved[j]);
        sol.lambda_s.push_back(res.lambda[j]);
        sol.state_active.push_back(res.lambda[j] > 0.0);
    }
    sol.achieved_Do = res.eval.achieved[num_states];
    sol.lambda_o = res.lambda[num_states];
    sol.obs_active = sol.lambda_o > 0.0;
    sol.iterations = res.iterations;
    sol.converged = res.converged && res.eval.converged;
    return sol;
}

}  // namespace

DiscreteRdfSolution solve_discrete_rdf_multi(const MultiStateDiscreteSource& source, const MultiBudget& budget,
                                             const DiscreteSolverOptions& opts) {
    validate_budget(budget);
    if (budget.D_s.size() != source.num_states())
        throw Error(Errc::DimensionMismatch, "one state budget per intrinsic state is required");
    if (source.num_states() + 1 > 63) throw Error(Errc::TooLarge, "too many intrinsic states");
    std::vector<Component> comps;
    for (std::size_t j = 0; j < source.num_states(); ++j)
        comps.push_back({reduce_state_distortion(source.states()[j]).table, budget.D_s[j],
                         source.num_states() == 1 ? std::string("D_s") : "D_s[" + std::to_string(j) + "]"});
    comps.push_back({source.obs_distortion(), budget.D_o, "D_o"});
    DualEngine engine(source.obs_marginal(), comps, opts);
    return package(solve_engine(engine, opts), comps, source.num_states(), opts);
}

DiscreteRdfSolution solve_discrete_rdf(const DiscreteSemanticSource& source, const DistortionBudget& budget,
                                       const DiscreteSolverOptions& opts) {
    validate_budget(budget);
    return solve_discrete_rdf_multi(MultiStateDiscreteSource::from_single(source), MultiBudget{{budget.D_s}, budget.D_o},
                                    opts);
}

DiscreteRdfSolution solve_discrete_weighted(const DiscreteSemanticSource& source, const WeightedBudget& budget,
                                            const DiscreteSolverOptions& opts) {
    validate_budget(budget);
    if (budget.w_s == 0.0) return solve_discrete_rdf(source, {kInf, budget.D_bar / budget.w_o}, opts);
    if (budget.w_o == 0.0) return solve_discrete_rdf(source, {budget.D_bar / budget.w_s, kInf}, opts);

    const Matrix reduced = reduce_state_distortion(source).table;
    const Matrix& d_o = source.obs_distortion();
    const Eigen::Index ns = reduced.cols();
    const Eigen::Index no = d_o.cols();
    Matrix composite(reduced.rows(), ns * no);
    for (Eigen::Index a = 0; a < ns; ++a)
        for (Eigen::Index b = 0; b < no; ++b) composite.col(a * no + b) = budget.w_s * reduced.col(a) + budget.w_o * d_o.col(b);

    std::vector<Component> comps{{composite, budget.D_bar, "D_bar"}};
    DualEngine engine(source.obs_marginal(), comps, opts);
    EngineResult res;
    try {
        res = solve_engine(engine, opts);
    } catch (const InfeasibleDistortion&) {
        auto [ds, dob] = minimal_distortions(source);
        throw InfeasibleDistortion("D_bar below the minimal achievable weighted distortion", {ds, dob});
    }
    if (!res.converged) throw Error(Errc::MaxIterationsExceeded, "weighted multiplier search did not converge");

    DiscreteRdfSolution sol;
    sol.rate = res.eval.rate;
    sol.conditional_pmf = expand_conditional(res, comps);
    const auto eval = evaluate_conditional(source, sol.conditional_pmf);
    sol.achieved_Ds = eval.Ds;
    sol.achieved_Do = eval.Do;
    sol.lambda_s = {budget.w_s * res.lambda[0]};
    sol.lambda_o = budget.w_o * res.lambda[0];
    sol.state_active = {res.lambda[0] > 0.0};
    sol.obs_active = res.lambda[0] > 0.0;
    sol.iterations = res.iterations;
    sol.converged = res.converged && res.eval.converged;
    return sol;
}

ConditionalEvaluation evaluate_conditional(const MultiStateDiscreteSource& source, const Matrix& q) {
    const Vector& p = source.obs_marginal();
    std::vector<Matrix> tables;
    for (const auto& st : source.states()) tables.push_back(reduce_state_distortion(st).table);
    tables.push_back(source.obs_distortion());
    Eigen::Index total = 1;
    for (const auto& t : tables) total *= t.cols();
    if (q.rows() != p.size() || q.cols() != total)
        throw Error(Errc::DimensionMismatch, "conditional pmf does not match the product reproduction alphabet");

    ConditionalEvaluation out;
    out.rate = mutual_information(p, q);
    std::vector<double> acc(tables.size(), 0.0);
    for (Eigen::Index col = 0; col < total; ++col) {
        Eigen::Index rem = col;
        std::vector<Eigen::Index> digit(tables.size());
        for (std::size_t c = tables.size(); c-- > 0;) {
            digit[c] = rem % tables[c].cols();
            rem /= tables[c].cols();
        }
        const Vector weight = p.cwiseProduct(q.col(col));
        for (std::size_t c = 0; c < tables.size(); ++c) acc[c] += weight.dot(tables[c].col(digit[c]));
    }
    out.Do = acc.back();
    acc.pop_back();
    out.Ds = std::move(acc);
    return out;
}

ConditionalEvaluation evaluate_conditional(const DiscreteSemanticSource& source, const Matrix& q) {
    return evaluate_conditional(MultiStateDiscreteSource::from_single(source), q);
}

}  // namespace semrd
