#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "semrd/discrete.hpp"
#include "semrd/presets.hpp"
#include "support.hpp"

using namespace semrd;

namespace {

DiscreteSemanticSource identity_binary() {
    const Matrix ham = hamming_distortion(2, 2);
    return deterministic_state_source(Vector::Constant(2, 0.5), {0, 1}, ham, ham);
}

// x uniform, s = x through a BSC(eps)
DiscreteSemanticSource bsc_source(double eps) {
    Matrix p(2, 2);
    p << 0.5 * (1 - eps), 0.5 * eps, 0.5 * eps, 0.5 * (1 - eps);
    const Matrix ham = hamming_distortion(2, 2);
    return DiscreteSemanticSource::create(p, ham, ham);
}

void check_solution_invariants(const DiscreteSemanticSource& src, const DistortionBudget& b, const DiscreteRdfSolution& s) {
    for (Eigen::Index r = 0; r < s.conditional_pmf.rows(); ++r)
        CHECK(std::abs(s.conditional_pmf.row(r).sum() - 1.0) < 1e-10);
    CHECK(s.conditional_pmf.minCoeff() >= 0.0);
    CHECK(s.achieved_Ds[0] <= b.D_s + 1e-7);
    CHECK(s.achieved_Do <= b.D_o + 1e-7);
    CHECK(s.rate >= 0.0);
    const auto ev = evaluate_conditional(src, s.conditional_pmf);
    CHECK(ev.rate == doctest::Approx(s.rate).epsilon(1e-9));
    CHECK(ev.Ds[0] == doctest::Approx(s.achieved_Ds[0]).epsilon(1e-9));
    CHECK(ev.Do == doctest::Approx(s.achieved_Do).epsilon(1e-9));
}

}  // namespace

TEST_CASE("reduced distortion") {
    const auto id = reduce_state_distortion(identity_binary()).table;
    CHECK((id - hamming_distortion(2, 2)).norm() == 0.0);

    Matrix p(2, 1);
    p << 0.5, 0.5;
    Matrix ds(2, 2);
    ds << 0.2, 0.8, 0.6, 0.1;
    const auto uni = DiscreteSemanticSource::create(p, ds, Matrix::Zero(1, 1));
    const auto t = reduce_state_distortion(uni).table;
    CHECK(t(0, 0) == doctest::Approx(0.4));
    CHECK(t(0, 1) == doctest::Approx(0.45));

    const auto b = reduce_state_distortion(bsc_source(0.1)).table;
    CHECK(b(0, 0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(b(0, 1) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(b(1, 1) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("zero rate at large budgets") {
    const auto src = bsc_source(0.1);
    const DistortionBudget b{1.0, 1.0};
    const auto s = solve_discrete_rdf(src, b);
    CHECK(s.rate == doctest::Approx(0.0));
    CHECK_FALSE(s.obs_active);
    CHECK_FALSE(s.state_active[0]);
    check_solution_invariants(src, b, s);
    // q does not depend on x
    CHECK((s.conditional_pmf.row(0) - s.conditional_pmf.row(1)).norm() < 1e-9);
}

TEST_CASE("binary Hamming rate") {
    const auto src = identity_binary();
    for (double D : {0.05, 0.11, 0.2, 0.3, 0.45}) {
        const DistortionBudget b{D, D};
        const auto s = solve_discrete_rdf(src, b);
        CHECK(s.rate == doctest::Approx(oracle::binary_hamming_rate(D)).epsilon(1e-6));
        check_solution_invariants(src, b, s);
    }
}

TEST_CASE("BSC state against the grid oracle") {
    const auto src = bsc_source(0.1);
    const DistortionBudget b{0.2, 0.3};
    const auto s = solve_discrete_rdf(src, b);
    check_solution_invariants(src, b, s);
    CHECK(std::abs(s.rate - exhaustive_discrete_oracle(src, b, 20)) < 1e-3);
}

TEST_CASE("infeasible discrete budgets") {
    const auto src = bsc_source(0.1);
    try {
        (void)solve_discrete_rdf(src, {0.05, 0.3});
        FAIL("expected infeasible");
    } catch (const InfeasibleDistortion& e) {
        CHECK(e.minimal_distortions()[0] == doctest::Approx(0.1));
        CHECK(std::string(e.what()).find("D_s") != std::string::npos);
    }
    const auto mins = minimal_distortions(src);
    CHECK(mins.first == doctest::Approx(0.1));
    CHECK(mins.second == doctest::Approx(0.0));
}

TEST_CASE("multi-state reductions") {
    const auto src = bsc_source(0.15);
    const DistortionBudget b{0.25, 0.2};
    const auto single = solve_discrete_rdf(src, b);
    const auto k1 = solve_discrete_rdf_multi(MultiStateDiscreteSource::from_single(src), {{0.25}, 0.2});
    CHECK(k1.rate == single.rate);
    CHECK(k1.achieved_Do == single.achieved_Do);

    const MultiStateDiscreteSource::State st{src.joint_pmf(), src.state_distortion()};
    const auto twice = MultiStateDiscreteSource::create({st, st}, src.obs_distortion());
    const auto k2 = solve_discrete_rdf_multi(twice, {{0.25, 0.25}, 0.2});
    CHECK(std::abs(k2.rate - single.rate) < 1e-6);
}

TEST_CASE("two binary states against the grid oracle") {
    Matrix p1(2, 2), p2(2, 2);
    p1 << 0.35, 0.1, 0.15, 0.4;
    p2 << 0.05, 0.3, 0.45, 0.2;
    const Matrix ham = hamming_distortion(2, 2);
    const auto src = MultiStateDiscreteSource::create({{p1, ham}, {p2, ham}}, Matrix::Zero(2, 1));
    const MultiBudget b{{0.32, 0.42}, kInf};
    const auto s = solve_discrete_rdf_multi(src, b);
    CHECK(s.achieved_Ds[0] <= 0.32 + 1e-7);
    CHECK(s.achieved_Ds[1] <= 0.42 + 1e-7);
    CHECK(std::abs(s.rate - exhaustive_discrete_oracle_multi(src, b, 20)) < 1e-3);
}

TEST_CASE("weighted discrete solver") {
    const auto src = presets::binary_source();
    const auto w0 = solve_discrete_weighted(src, {0.0, 1.0, 0.25});
    const auto plain = solve_discrete_rdf(src, {kInf, 0.25});
    CHECK(std::abs(w0.rate - plain.rate) < 1e-6);

    const auto two = solve_discrete_rdf(src, {0.3, 0.15});
    const auto w = solve_discrete_weighted(src, {1.0, 1.0, two.achieved_Ds[0] + two.achieved_Do});
    CHECK(w.rate <= two.rate + 1e-9);
}

TEST_CASE("time-sharing budgets inside a distortion jump") {
    // S = X = +-1 with a coarse grid of squared-error reproductions
    Matrix p = Matrix::Zero(2, 2);
    p(0, 0) = p(1, 1) = 0.5;
    Matrix d(2, 5);
    for (int x = 0; x < 2; ++x)
        for (int k = 0; k < 5; ++k) {
            const double e = (x == 0 ? -1.0 : 1.0) - (-1.0 + 0.5 * k);
            d(x, k) = e * e;
        }
    const auto src = DiscreteSemanticSource::create(p, d, d);
    const DistortionBudget b{0.5, 0.5};
    const auto s = solve_discrete_rdf(src, b);
    check_solution_invariants(src, b, s);
    CHECK(s.rate <= oracle::scalar_rdf(1.0, 1.0, 0.0, 0.5, 0.5).rate);
    CHECK(s.rate > 0.0);
    // only the observation budget binds in both, and the two tables agree
    const auto slack = solve_discrete_rdf(src, {1.0, 0.5});
    CHECK(std::abs(slack.rate - s.rate) < 1e-6);
    CHECK(std::abs(slack.achieved_Do - 0.5) < 1e-7);
}

TEST_CASE("block identity on small encoders") {
    const auto src = presets::binary_source();
    BlockEncoder e1{1, {1, 0}};
    const auto r1 = block_distortion_identity_check(src, e1);
    CHECK(std::abs(r1.lhs - r1.rhs) < 1e-15);
    BlockEncoder e2{2, {0, 1, 2, 3}};
    const auto r2 = block_distortion_identity_check(src, e2);
    CHECK(std::abs(r2.lhs - r2.rhs) < 1e-14);
    // identity encoder: distortion is the crossover rate
    CHECK(r2.lhs == doctest::Approx(0.2));
}
