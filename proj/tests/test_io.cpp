#include <cmath>
#include <sstream>

#include "doctest.h"
#include "semrd/io.hpp"
#include "semrd/presets.hpp"
#include "semrd/sweep.hpp"
#include "support.hpp"

using namespace semrd;

TEST_CASE("parse Gaussian and discrete models") {
    const auto g = parse_model(R"({"K_X": [[2, 0], [0, 1]], "H": [[1, 0]], "K_Z": [[0.1]]})");
    CHECK(g.kind == LoadedModel::Kind::Gaussian);
    CHECK(g.gaussian->trace_K_Z() == doctest::Approx(0.1));
    const auto nz = parse_model(R"({"K_X": [[2]], "H": [[1]]})");
    CHECK(nz.gaussian->trace_K_Z() == 0.0);

    const auto d = parse_model(R"({"p_sx": [[0.4, 0.1], [0.1, 0.4]], "d_s": [[0, 1], [1, 0]], "d_o": [[0, 1], [1, 0]]})");
    CHECK(d.kind == LoadedModel::Kind::Discrete);
    CHECK(d.discrete->obs_size() == 2);

    const auto c = parse_model(R"({"kx_first_row": [1, 0.4, 0, 0.4], "h_first_row": [1, 0, 0, 0]})");
    REQUIRE(c.circulant.has_value());
    CHECK(c.gaussian->K_X()(0, 1) == doctest::Approx(0.4));

    const auto mg = parse_model(R"({"K_X": [[1, 0], [0, 1]], "states": [{"H": [[1, 0]]}, {"H": [[0, 1]], "K_Z": [[0.5]]}]})");
    CHECK(mg.kind == LoadedModel::Kind::MultiGaussian);
    CHECK(mg.multi_gaussian->num_states() == 2);
}

TEST_CASE("model parse errors") {
    CHECK_ERRC(parse_model("{"), Errc::Parse);
    CHECK_ERRC(parse_model("[1, 2]"), Errc::Parse);
    CHECK_ERRC(parse_model(R"({"K_X": [[1, 0], [0]], "H": [[1, 0]]})"), Errc::Parse);
    CHECK_ERRC(parse_model(R"({"foo": 1})"), Errc::Parse);
    CHECK_ERRC(parse_model(R"({"K_X": [[1, 2], [2, 1]], "H": [[1, 0]]})"), Errc::NotPositiveDefinite);
}

TEST_CASE("round trips") {
    const auto toy = presets::toy_model();
    const auto back = parse_model(gaussian_model_json(toy));
    CHECK(back.gaussian->K_X() == toy.K_X());
    CHECK(back.gaussian->H() == toy.H());
    CHECK(back.gaussian->K_Z() == toy.K_Z());

    const auto bin = presets::binary_source();
    const auto bd = parse_model(discrete_model_json(bin));
    CHECK(bd.discrete->joint_pmf() == bin.joint_pmf());

    const auto rows = presets::circulant_rows();
    const auto cm = parse_model(circulant_model_json(rows));
    CHECK(cm.circulant->kx_first_row == rows.kx_first_row);
}

TEST_CASE("points files") {
    const auto a = parse_points("# comment\n1.5,4\n\n2, 3.5\n");
    REQUIRE(a.size() == 2);
    CHECK(a[1].first == 2.0);
    CHECK(a[1].second == 3.5);
    const auto b = parse_points("[[1, 2], [3, 4]]");
    CHECK(b.size() == 2);
    CHECK_ERRC(parse_points("[[1, 2, 3]]"), Errc::Parse);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(kInf) == "inf");
    CHECK(format_number(-kInf) == "-inf");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("sparse preset recipe") {
    const auto a = presets::sparse_model(42);
    const auto b = presets::sparse_model(42);
    CHECK(a.H() == b.H());
    CHECK(a.H().rows() == 16);
    CHECK(a.H().cols() == 64);
    CHECK((a.K_X() - 2 * Matrix::Identity(64, 64)).norm() == 0.0);
    CHECK(a.trace_K_Z() == 16.0);
    const auto nnz = (a.H().array() != 0.0).count();
    CHECK(nnz > 20);
    CHECK(nnz < 100);
    CHECK((a.H().array().abs() == 1.0 || a.H().array() == 0.0).all());
    CHECK(presets::sparse_model(43).H() != a.H());
}

TEST_CASE("sweep grid") {
    const auto rows = presets::circulant_rows();
    const auto model = parse_model(circulant_model_json(rows));
    SweepSpec spec{1e5, 2e5, 2, 1e5, 2e5, 2, SolverKind::Auto};
    const auto res = run_sweep(model, spec, 2);
    CHECK(res.solver == SolverKind::Waterfill);
    REQUIRE(res.cells.size() == 4);
    for (const auto& c : res.cells) {
        CHECK(c.rate == 0.0);
        CHECK(c.region == "A0");
    }
    std::ostringstream os;
    write_sweep_csv(os, res, false);
    CHECK(os.str().rfind("# rate unit: nats\nD_s,D_o,rate,region\n100000,100000,0,A0\n", 0) == 0);

    const auto toy = LoadedModel{LoadedModel::Kind::Gaussian, presets::toy_model(), {}, {}, {}, {}};
    SweepSpec ts{0.5, 3.0, 3, 1.0, 5.0, 3, SolverKind::Auto};
    const auto tr = run_sweep(toy, ts);
    CHECK(tr.solver == SolverKind::Gaussian);
    CHECK(std::isinf(tr.cells[0].rate));
    CHECK(tr.cells[0].region == "none");
    CHECK_FALSE(tr.any_failed);
    // order is D_s outer
    CHECK(tr.cells[1].D_s == 0.5);
    CHECK(tr.cells[1].D_o == 3.0);

    CHECK_ERRC(validate_sweep_spec(SweepSpec{1, 0, 3, 0, 1, 3}), Errc::InvalidArgument);
    CHECK_ERRC(validate_sweep_spec(SweepSpec{0, 1, 1, 0, 1, 3}), Errc::InvalidArgument);
    CHECK_ERRC(resolve_solver(toy, SolverKind::Waterfill), Errc::NotDiagonalizable);
}
