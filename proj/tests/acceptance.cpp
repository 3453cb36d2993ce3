// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "commands.hpp"
#include "oracles.hpp"
#include "semrd/discrete.hpp"
#include "semrd/gaussian.hpp"
#include "semrd/presets.hpp"
#include "semrd/verify.hpp"
#include "semrd/waterfill.hpp"

using namespace semrd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// Runs body(i) for i in [0, n) over the worker pool.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    std::atomic<std::size_t> next{0};
    const unsigned nw = std::max(1u, std::min<unsigned>(default_worker_count(), static_cast<unsigned>(n)));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nw; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        });
    for (auto& t : pool) t.join();
}

SpectralModel circulant_model() {
    const auto rows = presets::circulant_rows();
    return circulant_spectral(rows.kx_first_row, rows.h_first_row, 0.0);
}

GaussianSemanticModel circulant_dense() {
    const auto rows = presets::circulant_rows();
    return validate_gaussian_model(circulant_matrix(rows.kx_first_row), circulant_matrix(rows.h_first_row),
                                   Matrix::Zero(128, 128));
}

// ------------------------------------------------------------------ 1

Outcome scalar_exactness() {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_rate = 0.0, worst_delta = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double var = 0.05 + 10.0 * u(rng);
        const double h = i % 20 == 0 ? 0.0 : (u(rng) < 0.5 ? -1.0 : 1.0) * (0.05 + 3.0 * u(rng));
        const double vz = 2.0 * u(rng);
        const double ds = vz + (h == 0.0 ? 0.01 + u(rng) : h * h * var * (0.01 + 1.3 * u(rng)));
        const double dob = var * (0.01 + 1.3 * u(rng));
        const auto m = validate_gaussian_model(Matrix::Constant(1, 1, var), Matrix::Constant(1, 1, h),
                                               Matrix::Constant(1, 1, vz));
        const auto s = solve_gaussian_rdf(m, {ds, dob});
        const auto ref = oracle::scalar_rdf(var, h, vz, ds, dob);
        worst_rate = std::max(worst_rate, std::abs(s.rate - ref.rate));
        worst_delta = std::max(worst_delta, std::abs(s.Delta(0, 0) - ref.delta));
    }
    return {worst_rate < 1e-8 && worst_delta < 1e-8,
            fmt("max |rate err| %.2e, max |delta err| %.2e over 1000 models", worst_rate, worst_delta)};
}

// ------------------------------------------------------------------ 2

Outcome solver_cross_agreement() {
    struct Case {
        GaussianSemanticModel model;
        std::vector<std::pair<double, double>> budgets;
    };
    std::mt19937_64 rng(2002);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Case> cases;
    for (int c = 0; c < 50; ++c) {
        const int m = 2 + c % 15;
        const Matrix q = oracle::random_orthogonal(m, rng);
        Vector sigma(m), alpha(m);
        for (int j = 0; j < m; ++j) {
            sigma(j) = 0.2 + 4.8 * u(rng);
            alpha(j) = u(rng) < 0.25 ? 0.0 : 0.05 + 3.0 * u(rng);
        }
        if (alpha.maxCoeff() == 0.0) alpha(0) = 1.0;
        const Matrix kx = q * sigma.asDiagonal() * q.transpose();
        const Matrix h = alpha.cwiseSqrt().asDiagonal() * q.transpose();
        Matrix b(m, m);
        for (int r = 0; r < m; ++r)
            for (int k = 0; k < m; ++k) b(r, k) = u(rng) - 0.5;
        const Matrix kz = 0.1 / m * b * b.transpose();
        Case cs{validate_gaussian_model(kx, h, kz), {}};
        const double hk = alpha.dot(sigma);
        for (int k = 0; k < 10; ++k)
            cs.budgets.emplace_back(kz.trace() + hk * (0.05 + 1.05 * u(rng)), sigma.sum() * (0.05 + 1.05 * u(rng)));
        cases.push_back(std::move(cs));
    }
    std::vector<double> rate_err(cases.size(), 0.0), delta_err(cases.size(), 0.0);
    std::vector<std::string> errors(cases.size());
    parallel_for(cases.size(), [&](std::size_t c) {
        try {
            const auto sp = simultaneous_diagonalize(cases[c].model);
            if (!sp) throw std::runtime_error("not diagonalizable");
            for (const auto& [ds, dob] : cases[c].budgets) {
                const auto w = waterfill_solve(*sp, ds, dob);
                const auto g = solve_gaussian_rdf(cases[c].model, {ds, dob});
                rate_err[c] = std::max(rate_err[c], std::abs(w.rate - g.rate));
                delta_err[c] = std::max(delta_err[c], (delta_matrix(*sp, w.delta) - g.Delta).norm());
            }
        } catch (const std::exception& e) {
            errors[c] = e.what();
        }
    });
    for (std::size_t c = 0; c < cases.size(); ++c)
        if (!errors[c].empty()) return {false, fmt("model %zu: %s", c, errors[c].c_str())};
    const double r = *std::max_element(rate_err.begin(), rate_err.end());
    const double d = *std::max_element(delta_err.begin(), delta_err.end());
    return {r < 1e-6 && d < 1e-4, fmt("500 solves, max |rate diff| %.2e, max ||Delta diff||_F %.2e", r, d)};
}

// ------------------------------------------------------------------ 3

Outcome gaussian_oracle_agreement() {
    const auto toy = presets::toy_model();
    const double ceiling = toy.state_distortion_ceiling();
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 5; ++i)
        for (int k = 0; k < 5; ++k)
            pts.emplace_back(1.0 + (ceiling - 1.0) * i / 4.0, 1.0 + 15.0 * k / 4.0);
    std::vector<double> err(pts.size(), 0.0);
    parallel_for(pts.size(), [&](std::size_t i) {
        const DistortionBudget b{pts[i].first, pts[i].second};
        err[i] = std::abs(solve_gaussian_rdf(toy, b).rate - exhaustive_gaussian_oracle(toy, b));
    });
    const double worst = *std::max_element(err.begin(), err.end());
    return {worst < 1e-4, fmt("25 toy budgets, max |interior point - oracle| %.2e", worst)};
}

// ------------------------------------------------------------------ 4

Outcome discrete_oracle_agreement() {
    std::mt19937_64 rng(4004);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int steps = 20;
    const double tol = std::max(1e-3, 2.0 / steps);
    double worst = 0.0;
    for (int c = 0; c < 20; ++c) {
        Matrix p(2, 2), ds(2, 2), dob(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                p(i, j) = 0.05 + u(rng);
                ds(i, j) = u(rng);
                dob(i, j) = u(rng);
            }
        p /= p.sum();
        const auto src = DiscreteSemanticSource::create(p, ds, dob);
        const Matrix red = reduce_state_distortion(src).table;
        const Vector& px = src.obs_marginal();
        const auto mins = minimal_distortions(src);
        const double zs = (px.transpose() * red).minCoeff(), zo = (px.transpose() * dob).minCoeff();
        const DistortionBudget b{mins.first + (zs - mins.first) * (0.1 + 0.8 * u(rng)),
                                 mins.second + (zo - mins.second) * (0.1 + 0.8 * u(rng))};
        try {
            const double r = solve_discrete_rdf(src, b).rate;
            worst = std::max(worst, std::abs(r - exhaustive_discrete_oracle(src, b, steps)));
        } catch (const std::exception& e) {
            return {false, fmt("source %d: %s", c, e.what())};
        }
    }
    const Matrix ham = hamming_distortion(2, 2);
    const auto bin = deterministic_state_source(Vector::Constant(2, 0.5), {0, 1}, ham, ham);
    double ham_solver = 0.0, ham_oracle = 0.0;
    for (double D : {0.1, 0.2, 0.3}) {
        const double ref = oracle::binary_hamming_rate(D);
        ham_solver = std::max(ham_solver, std::abs(solve_discrete_rdf(bin, {D, D}).rate - ref));
        ham_oracle = std::max(ham_oracle, std::abs(exhaustive_discrete_oracle(bin, {D, D}, steps) - ref));
    }
    return {worst < tol && ham_solver < 2e-2 && ham_oracle < 2e-2,
            fmt("20 sources max |solver - oracle| %.2e (tol %.2g); Hamming: solver %.2e, oracle %.2e vs ln2 - H_b(D)",
                worst, tol, ham_solver, ham_oracle)};
}

// ------------------------------------------------------------------ 5

Outcome block_identity() {
    std::mt19937_64 rng(5005);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix ds(2, 2);
    ds << 0.0, 1.3, 0.7, 0.2;
    const auto src = DiscreteSemanticSource::create(presets::binary_source().joint_pmf(), ds, hamming_distortion(2, 2));
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n) {
        const std::uint32_t words = 1u << n;
        for (int e = 0; e < 30; ++e) {
            BlockEncoder enc{n, {}};
            for (std::uint32_t w = 0; w < words; ++w) enc.state_repro.push_back(static_cast<std::uint32_t>(rng() % words));
            const auto r = block_distortion_identity_check(src, enc);
            worst = std::max(worst, std::abs(r.lhs - r.rhs));
        }
    }
    return {worst < 1e-13, fmt("90 encoders (n = 1, 2, 3), max |lhs - rhs| %.2e", worst)};
}

// ------------------------------------------------------------------ 6

Outcome channel_psd_and_monte_carlo() {
    std::mt19937_64 rng(6006);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = kInf;
    for (int i = 0; i < 500; ++i) {
        const int m = 1 + i % 8;
        const Matrix k = oracle::random_spd(m, rng, i % 5 == 0 ? 1e-4 : 0.05, 5.0);
        const Matrix v = oracle::random_orthogonal(m, rng);
        Vector c(m);
        for (int j = 0; j < m; ++j) c(j) = i % 4 == 0 && j == 0 ? 1.0 : 1e-3 + (1.0 - 1e-3) * u(rng);
        const Matrix r = linalg::psd_sqrt(k);
        const Matrix delta = linalg::symmetrize(r * v * c.asDiagonal() * v.transpose() * r);
        worst = std::min(worst, lemma2_psd_check(delta, k));
    }
    const auto toy = presets::toy_model();
    const auto sol = solve_gaussian_rdf(toy, {1.5, 4.0});
    const auto ch = build_test_channel(toy, sol.Delta);
    const auto mc = monte_carlo_distortions(ch, 1000000, 1);
    const double to = sol.Delta.trace();
    const double ts = (toy.H() * sol.Delta * toy.H().transpose()).trace() + toy.trace_K_Z();
    const double zo = std::abs(mc.Do_hat - to) / mc.Do_se, zs = std::abs(mc.Ds_hat - ts) / mc.Ds_se;
    return {worst >= -1e-10 && zo <= 3.0 && zs <= 3.0,
            fmt("min eigenvalue %.2e over 500 pairs; MC D_o %.5f vs %.5f (%.2f SE), D_s %.5f vs %.5f (%.2f SE)", worst,
                mc.Do_hat, to, zo, mc.Ds_hat, ts, zs)};
}

// ------------------------------------------------------------------ 7

Outcome region_consistency() {
    const auto sp = circulant_model();
    const auto dense = circulant_dense();
    const int n = 40;
    const double C = sp.state_ceiling(), T = sp.trace_K_X();
    struct Cell {
        double ds, dob;
        Region region;
        double margin;
    };
    std::vector<Cell> cells;
    int wf_mismatch = 0;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double ds = C * (0.02 + 1.08 * i / (n - 1)), dob = T * (0.02 + 1.08 * k / (n - 1));
            const Region r = classify_region(sp, ds, dob);
            const auto w = waterfill_solve(sp, ds, dob);
            const Region wr = region_from_activity(w.mu > 0.0, w.lambda > 0.0);
            const double margin = region_boundary_margin(sp, ds, dob);
            if (margin > 1e-6 && wr != r) ++wf_mismatch;
            cells.push_back({ds, dob, r, margin});
        }
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i].margin > 1e-6) eligible.push_back(i);
    const std::size_t band = cells.size() - eligible.size();
    std::vector<std::size_t> sample;
    // Evenly spaced within each region, 50 cells in total.
    std::map<Region, std::vector<std::size_t>> by_region;
    for (std::size_t i : eligible) by_region[cells[i].region].push_back(i);
    std::map<Region, std::size_t> quota;
    for (std::size_t left = 50; left > 0;)
        for (auto& [r, idx] : by_region)
            if (left > 0 && quota[r] < idx.size()) {
                ++quota[r];
                --left;
            }
    for (auto& [r, idx] : by_region)
        for (std::size_t s = 0; s < quota[r]; ++s) sample.push_back(idx[s * idx.size() / quota[r]]);
    std::vector<int> ip_region(sample.size(), -1);
    std::vector<std::string> errors(sample.size());
    parallel_for(sample.size(), [&](std::size_t s) {
        const Cell& c = cells[sample[s]];
        try {
            ip_region[s] = static_cast<int>(solve_gaussian_rdf(dense, {c.ds, c.dob}).region);
        } catch (const std::exception& e) {
            errors[s] = fmt("%s at (%.6g, %.6g) in %s", e.what(), c.ds, c.dob, std::string(to_string(c.region)).c_str());
        }
    });
    int ip_mismatch = 0;
    std::map<int, int> seen;
    for (std::size_t s = 0; s < sample.size(); ++s) {
        if (!errors[s].empty()) return {false, fmt("interior point failed at a sampled cell: %s", errors[s].c_str())};
        if (ip_region[s] != static_cast<int>(cells[sample[s]].region)) ++ip_mismatch;
        ++seen[ip_region[s]];
    }
    return {wf_mismatch == 0 && ip_mismatch == 0 && seen.size() == 4,
            fmt("1600 cells (%zu in the band): %d waterfill mismatches; 50 sampled interior-point solves, %d mismatches, "
                "%zu regions covered",
                band, wf_mismatch, ip_mismatch, seen.size())};
}

// ------------------------------------------------------------------ 8

Outcome circulant_reproduction() {
    const auto sp = circulant_model();
    const auto rows = presets::circulant_rows();
    Vector dense_ev = Eigen::SelfAdjointEigenSolver<Matrix>(circulant_matrix(rows.kx_first_row)).eigenvalues();
    Vector ours = sp.sigma;
    std::sort(ours.data(), ours.data() + ours.size());
    double sigma_err = (dense_ev - ours).cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < sp.size(); ++k) {
        const double j = static_cast<double>(sp.frequency[static_cast<std::size_t>(k)]);
        sigma_err = std::max(sigma_err, std::abs(sp.sigma(k) - (1.0 + 0.8 * std::cos(2 * std::numbers::pi * j / 128))));
    }

    const double C = sp.state_ceiling(), T = sp.trace_K_X();
    double worst_rate = 0.0, worst_profile = 0.0;
    std::string regions;
    bool profile_ok = true;
    for (double th : {0.6, 0.9, 1.05, 1.2, 1.35}) {
        const double dx = C * std::cos(th), dy = T * std::sin(th);
        auto rate_at = [&](double s) { return waterfill_solve(sp, s * dx, s * dy).rate; };
        double hi = 1.0;
        while (rate_at(hi) > 50.0) hi *= 2.0;
        double lo = hi / 2.0;
        while (rate_at(lo) < 50.0) lo /= 2.0;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (rate_at(mid) > 50.0 ? lo : hi) = mid;
        }
        const auto sol = waterfill_solve(sp, hi * dx, hi * dy);
        worst_rate = std::max(worst_rate, std::abs(sol.rate - 50.0));
        regions += std::string(regions.empty() ? "" : " ") + std::string(to_string(sol.region));
        for (Eigen::Index j = 0; j < sp.size(); ++j) {
            if (sol.delta(j) >= sp.sigma(j) * (1 - 1e-12)) continue;
            double level = 0.0;
            if (sol.region == Region::A1) level = 1.0 / sol.lambda;
            else if (sol.region == Region::A3) level = 1.0 / (sol.lambda + sol.mu * sp.alpha(j));
            else if (sol.region == Region::A2) level = 1.0 / (sol.mu * sp.alpha(j));
            worst_profile = std::max(worst_profile, std::abs(sol.delta(j) - level));
        }
        if (sol.region == Region::A1) {
            double lo_lvl = kInf, hi_lvl = 0.0;
            for (Eigen::Index j = 0; j < sp.size(); ++j)
                if (sol.delta(j) < sp.sigma(j) * (1 - 1e-12)) {
                    lo_lvl = std::min(lo_lvl, sol.delta(j));
                    hi_lvl = std::max(hi_lvl, sol.delta(j));
                }
            profile_ok = profile_ok && hi_lvl - lo_lvl < 1e-9;
        }
    }
    const bool order_ok = regions == "A1 A1 A3 A3 A2";
    return {sigma_err < 1e-10 && worst_rate < 1e-3 && worst_profile < 1e-9 && profile_ok && order_ok,
            fmt("sigma err %.2e; contour points %s, max |rate - 50| %.2e; max water-level err %.2e", sigma_err,
                regions.c_str(), worst_rate, worst_profile)};
}

// ------------------------------------------------------------------ 9

struct Grid {
    std::vector<double> ds, dob;
    std::vector<std::vector<double>> rate;
};

Grid read_sweep(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    std::vector<std::tuple<double, double, double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("D_s", 0) == 0) continue;
        std::istringstream ls(line);
        std::string a, b, c;
        std::getline(ls, a, ',');
        std::getline(ls, b, ',');
        std::getline(ls, c, ',');
        rows.emplace_back(std::stod(a), std::stod(b), std::stod(c));
    }
    Grid g;
    for (const auto& [a, b, c] : rows) {
        if (g.ds.empty() || g.ds.back() != a) g.ds.push_back(a);
        if (g.ds.size() == 1) g.dob.push_back(b);
    }
    g.rate.assign(g.ds.size(), std::vector<double>(g.dob.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) g.rate[i / g.dob.size()][i % g.dob.size()] = std::get<2>(rows[i]);
    return g;
}

struct PropertyReport {
    double worst_mono = 0.0;
    double worst_convex = 0.0;
    int checks = 0;
};

PropertyReport check_properties(const Grid& g) {
    PropertyReport rep;
    const int ni = static_cast<int>(g.ds.size()), nk = static_cast<int>(g.dob.size());
    auto r = [&](int i, int k) { return g.rate[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]; };
    auto fin = [](double v) { return std::isfinite(v); };
    for (int i = 0; i < ni; ++i)
        for (int k = 0; k < nk; ++k) {
            if (!fin(r(i, k))) continue;
            if (i + 1 < ni && fin(r(i + 1, k))) rep.worst_mono = std::max(rep.worst_mono, r(i + 1, k) - r(i, k));
            if (k + 1 < nk && fin(r(i, k + 1))) rep.worst_mono = std::max(rep.worst_mono, r(i, k + 1) - r(i, k));
            for (auto [di, dk] : {std::pair{1, 0}, std::pair{0, 1}, std::pair{1, 1}, std::pair{1, -1}}) {
                const int i2 = i + 2 * di, k2 = k + 2 * dk;
                if (i2 >= ni || k2 < 0 || k2 >= nk) continue;
                const double a = r(i, k), m = r(i + di, k + dk), b = r(i2, k2);
                if (!fin(a) || !fin(m) || !fin(b)) continue;
                rep.worst_convex = std::max(rep.worst_convex, m - 0.5 * (a + b));
                ++rep.checks;
            }
        }
    return rep;
}

Outcome sweep_shape_properties() {
    const fs::path dir = fs::temp_directory_path() / ("semrd_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto cli = [](std::vector<std::string> args) {
        args.insert(args.begin(), "semrd");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        return cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    };
    const std::string toy = (dir / "toy.json").string(), circ = (dir / "circ.json").string();
    const std::string toy_csv = (dir / "toy.csv").string(), circ_csv = (dir / "circ.csv").string();
    if (cli({"gen", "toy", "-o", toy}) != 0 || cli({"gen", "circulant", "-o", circ}) != 0)
        return {false, "could not write model files"};
    const int a = cli({"sweep", toy, "--solver", "gaussian", "--ds", "0.5,3.5,50", "--do", "0.2,16,50", "-o", toy_csv});
    const int b = cli({"sweep", circ, "--ds", "0.5,80,50", "--do", "1,140,50", "-o", circ_csv});
    if (a != 0 || b != 0) return {false, fmt("sweep exit codes %d, %d", a, b)};
    const auto rt = check_properties(read_sweep(toy_csv));
    const auto rc = check_properties(read_sweep(circ_csv));
    fs::remove_all(dir);
    const double mono = std::max(rt.worst_mono, rc.worst_mono), conv = std::max(rt.worst_convex, rc.worst_convex);
    return {mono <= 1e-5 && conv <= 1e-5 && rt.checks > 0 && rc.checks > 0,
            fmt("toy (interior point) and circulant (waterfill) 50x50 files: max increase %.2e, max midpoint excess %.2e "
                "over %d midpoint checks",
                mono, conv, rt.checks + rc.checks)};
}

// ------------------------------------------------------------------ 10

Outcome gaussian_upper_bound() {
    DiscreteSolverOptions dopts;
    dopts.ba_gap_tol = 1e-6;
    dopts.ba_max_iterations = 5000;
    dopts.outer_tol = 1e-5;

    const int L = 64;
    const double w = 8.0 / L;
    auto Phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    MomentSource q;
    q.joint_pmf = Matrix::Zero(2 * L, L);
    q.obs_points.resize(L, 1);
    q.state_points.resize(2 * L, 1);
    for (int i = 0; i < L; ++i) {
        const double a = -4.0 + i * w;
        const double mass = (i == L - 1 ? 1.0 : Phi(a + w)) - (i == 0 ? 0.0 : Phi(a));
        const double x = a + 0.5 * w;
        q.obs_points(i, 0) = x;
        q.state_points(2 * i, 0) = x - 0.5;
        q.state_points(2 * i + 1, 0) = x + 0.5;
        q.joint_pmf(2 * i, i) = q.joint_pmf(2 * i + 1, i) = 0.5 * mass;
    }
    const int nr = 25;
    q.state_repro.resize(nr, 1);
    q.obs_repro.resize(nr, 1);
    for (int k = 0; k < nr; ++k) q.state_repro(k, 0) = q.obs_repro(k, 0) = -3.0 + 6.0 * k / (nr - 1);

    MomentSource u;
    u.joint_pmf = Matrix::Zero(2, 2);
    u.joint_pmf(0, 0) = u.joint_pmf(1, 1) = 0.5;
    u.obs_points.resize(2, 1);
    u.obs_points << -1.0, 1.0;
    u.state_points = u.obs_points;
    const int ng = 41;
    u.state_repro.resize(ng, 1);
    u.obs_repro.resize(ng, 1);
    for (int k = 0; k < ng; ++k) u.state_repro(k, 0) = u.obs_repro(k, 0) = -1.0 + 2.0 * k / (ng - 1);

    const std::vector<std::pair<double, double>> qb{{0.6, 0.5}, {0.4, 0.8}, {0.5, 0.3}, {0.8, 0.2}, {0.35, 0.6}};
    const std::vector<std::pair<double, double>> ub{{0.5, 0.5}, {0.2, 0.8}, {0.9, 0.3}, {0.1, 0.1}, {0.7, 0.95}};
    std::vector<UpperBoundCheck> res(10);
    std::vector<std::string> errors(10);
    parallel_for(10, [&](std::size_t i) {
        try {
            res[i] = i < 5 ? gaussian_upper_bound_check(q, {qb[i].first, qb[i].second}, 0.05, dopts)
                           : gaussian_upper_bound_check(u, {ub[i - 5].first, ub[i - 5].second}, 1e-3, dopts);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    double q_excess = -kInf, u_excess = -kInf;
    for (std::size_t i = 0; i < 10; ++i) {
        if (!errors[i].empty()) return {false, fmt("pair %zu: %s", i, errors[i].c_str())};
        const double ex = res[i].rate_discrete - res[i].rate_gaussian;
        (i < 5 ? q_excess : u_excess) = std::max(i < 5 ? q_excess : u_excess, ex);
    }
    return {q_excess <= 0.05 && u_excess <= 1e-3,
            fmt("max R_disc - R_G: quantized %.2e (tol 0.05), uniform +-1 %.2e (tol 1e-3)", q_excess, u_excess)};
}

// ------------------------------------------------------------------ 11

// Minimum of R(D_s, (D_bar - w_s D_s) / w_o) over 101 D_s values spanning the
// non-dominated part of the budget line, then a second 101-point pass over
// the two cells around the best one.
double sweep_minimum(const std::function<double(double)>& rate, double lo, double hi) {
    double best = kInf;
    for (int pass = 0; pass < 2; ++pass) {
        double arg = lo;
        for (int i = 0; i <= 100; ++i) {
            const double ds = lo + (hi - lo) * i / 100.0;
            double r = kInf;
            try {
                r = rate(ds);
            } catch (const Error& e) {
                if (!e.is_infeasible()) throw;
            }
            if (r < best) {
                best = r;
                arg = ds;
            }
        }
        const double h = (hi - lo) / 100.0;
        lo = std::max(lo, arg - h);
        hi = std::min(hi, arg + h);
    }
    return best;
}

Outcome weighted_consistency() {
    const auto toy = presets::toy_model();
    double worst = 0.0;
    std::string worst_case;
    for (double dbar : {3.0, 6.0, 10.0}) {
        const double ws = 1.0, wo = 1.0;
        const double w = solve_gaussian_rdf_weighted(toy, {ws, wo, dbar}).rate;
        const double lo = std::max(toy.trace_K_Z(), (dbar - wo * toy.K_X().trace()) / ws);
        const double hi = std::min(toy.state_distortion_ceiling(), dbar / ws);
        const double s = sweep_minimum([&](double ds) { return solve_gaussian_rdf(toy, {ds, (dbar - ws * ds) / wo}).rate; },
                                       lo, hi);
        if (std::abs(w - s) >= worst) {
            worst = std::abs(w - s);
            worst_case = fmt("toy D_bar %g", dbar);
        }
    }
    const auto bin = presets::binary_source();
    const auto mins = minimal_distortions(bin);
    const double dbar = 0.5;
    const double w = solve_discrete_weighted(bin, {1.0, 1.0, dbar}).rate;
    const double s = sweep_minimum([&](double ds) { return solve_discrete_rdf(bin, {ds, dbar - ds}).rate; }, mins.first,
                                   dbar - mins.second);
    if (std::abs(w - s) >= worst) {
        worst = std::abs(w - s);
        worst_case = "binary D_bar 0.5";
    }
    return {worst < 1e-4, fmt("max |weighted - sweep minimum| %.2e (%s)", worst, worst_case.c_str())};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "scalar analytic exactness", 5, scalar_exactness},
        {2, "waterfill vs interior point", 60, solver_cross_agreement},
        {3, "Gaussian oracle agreement", 120, gaussian_oracle_agreement},
        {4, "discrete oracle agreement", 120, discrete_oracle_agreement},
        {5, "block distortion identity", 10, block_identity},
        {6, "test channel psd and Monte Carlo", 60, channel_psd_and_monte_carlo},
        {7, "region classification vs constraint activity", 600, region_consistency},
        {8, "circulant spectrum, contour and water levels", 60, circulant_reproduction},
        {9, "monotonicity and convexity of emitted sweeps", 60, sweep_shape_properties},
        {10, "Gaussian upper bound on discrete sources", 120, gaussian_upper_bound},
        {11, "weighted solvers vs budget-line sweeps", 120, weighted_consistency},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.limit;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("%s [%d] %s: %s; %.2f s (limit %g s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    c.limit, in_time ? "" : " TOO SLOW");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
