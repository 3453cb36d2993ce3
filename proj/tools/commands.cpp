#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "semrd/discrete.hpp"
#include "semrd/gaussian.hpp"
#include "semrd/io.hpp"
#include "semrd/presets.hpp"
#include "semrd/sweep.hpp"
#include "semrd/verify.hpp"
#include "semrd/waterfill.hpp"

namespace semrd::cli {

namespace {

using ojson = nlohmann::ordered_json;

ojson json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

// Ordered key/value record printed either as "key: value" lines or as one
// JSON object.
class Record {
public:
    void str(const std::string& key, const std::string& v) {
        json_[key] = v;
        text_.emplace_back(key, v);
    }
    void num(const std::string& key, double v) {
        json_[key] = json_number(v);
        text_.emplace_back(key, format_number(v));
    }
    void integer(const std::string& key, long v) {
        json_[key] = v;
        text_.emplace_back(key, std::to_string(v));
    }
    void flag(const std::string& key, bool v) {
        json_[key] = v;
        text_.emplace_back(key, v ? "true" : "false");
    }
    void nums(const std::string& key, const std::vector<double>& v) {
        ojson arr = ojson::array();
        std::string t;
        for (std::size_t i = 0; i < v.size(); ++i) {
            arr.push_back(json_number(v[i]));
            t += (i ? " " : "") + format_number(v[i]);
        }
        json_[key] = arr;
        text_.emplace_back(key, t);
    }
    void flags(const std::string& key, const std::vector<bool>& v) {
        ojson arr = ojson::array();
        std::string t;
        for (std::size_t i = 0; i < v.size(); ++i) {
            arr.push_back(static_cast<bool>(v[i]));
            t += std::string(i ? " " : "") + (v[i] ? "true" : "false");
        }
        json_[key] = arr;
        text_.emplace_back(key, t);
    }
    void matrix(const std::string& key, const Matrix& m) {
        ojson arr = ojson::array();
        std::string t;
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            ojson row = ojson::array();
            t += "\n ";
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                row.push_back(json_number(m(r, c)));
                t += " " + format_number(m(r, c));
            }
            arr.push_back(row);
        }
        json_[key] = arr;
        text_.emplace_back(key, t);
    }

    void write(std::ostream& out, bool as_json) const {
        if (as_json) {
            out << json_.dump(2) << '\n';
            return;
        }
        for (const auto& [k, v] : text_) out << k << ':' << (v.empty() || v.front() == '\n' ? "" : " ") << v << '\n';
    }

private:
    ojson json_ = ojson::object();
    std::vector<std::pair<std::string, std::string>> text_;
};

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        if (e.is_infeasible() || e.code() == Errc::NotDiagonalizable) return kExitInfeasible;
        if (e.is_solver_failure()) return kExitSolver;
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

double in_unit(const Globals& g, double nats) { return g.bits ? nats / std::numbers::ln2 : nats; }

std::string unit_name(const Globals& g) { return g.bits ? "bits" : "nats"; }

GaussianSolverOptions gaussian_options(const Globals& g) {
    GaussianSolverOptions o;
    if (g.tol) o.gap_tol = *g.tol;
    return o;
}

DiscreteSolverOptions discrete_options(const Globals& g) {
    DiscreteSolverOptions o;
    if (g.tol) o.outer_tol = *g.tol;
    return o;
}

// Writes to `path`, or to `out` when the path is empty.
template <class F>
void with_output(const std::string& path, std::ostream& out, F&& write) {
    if (path.empty()) {
        write(out);
        return;
    }
    std::ostringstream buf;
    write(buf);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::Parse, "cannot write " + path);
    f << buf.str();
}

std::vector<double> state_budgets(const std::vector<double>& given, std::size_t k) {
    if (given.empty()) return std::vector<double>(k, kInf);
    if (given.size() != k)
        throw Error(Errc::DimensionMismatch,
                    "expected " + std::to_string(k) + " state budget(s), got " + std::to_string(given.size()));
    return given;
}

void gaussian_record(Record& rec, const Globals& g, const GaussianRdfSolution& sol, bool single_state) {
    rec.num("rate", in_unit(g, sol.rate));
    if (single_state) rec.str("region", std::string(to_string(sol.region)));
    rec.num("lambda", sol.lambda);
    rec.nums("mu", sol.mu);
    rec.flag("obs_active", sol.obs_active);
    rec.flags("state_active", sol.state_active);
    rec.num("achieved_D_o", sol.Delta.trace());
    rec.integer("iterations", sol.newton_iterations);
    rec.num("gap_bound", sol.gap_bound);
}

void discrete_record(Record& rec, const Globals& g, const DiscreteRdfSolution& sol) {
    rec.num("rate", in_unit(g, sol.rate));
    if (sol.state_active.size() == 1)
        rec.str("region", std::string(to_string(region_from_activity(sol.state_active[0], sol.obs_active))));
    rec.num("lambda_o", sol.lambda_o);
    rec.nums("lambda_s", sol.lambda_s);
    rec.flag("obs_active", sol.obs_active);
    rec.flags("state_active", sol.state_active);
    rec.num("achieved_D_o", sol.achieved_Do);
    rec.nums("achieved_D_s", sol.achieved_Ds);
    rec.integer("iterations", sol.iterations);
    rec.flag("converged", sol.converged);
}

bool is_discrete(const LoadedModel& m) { return m.discrete || m.multi_discrete; }

int solve_weighted(const Globals& g, const SolveArgs& a, const LoadedModel& model, Record& rec) {
    const std::vector<double> w = a.weights.empty() ? std::vector<double>{1.0, 1.0} : a.weights;
    if (w.size() != 2) throw Error(Errc::InvalidArgument, "--weights takes w_s,w_o");
    const WeightedBudget budget{w[0], w[1], *a.D_bar};
    const SolverKind kind = parse_solver_kind(a.solver);
    if (model.discrete && (kind == SolverKind::Auto || kind == SolverKind::Discrete)) {
        const auto sol = solve_discrete_weighted(*model.discrete, budget, discrete_options(g));
        rec.str("solver", "discrete-weighted");
        rec.str("unit", unit_name(g));
        discrete_record(rec, g, sol);
        return kExitOk;
    }
    if (model.gaussian && (kind == SolverKind::Auto || kind == SolverKind::Gaussian)) {
        const auto sol = solve_gaussian_rdf_weighted(*model.gaussian, budget, gaussian_options(g));
        rec.str("solver", "gaussian-weighted");
        rec.str("unit", unit_name(g));
        gaussian_record(rec, g, sol, true);
        const GaussianSemanticModel& gm = *model.gaussian;
        rec.num("achieved_D_s", (gm.H() * sol.Delta * gm.H().transpose()).trace() + gm.trace_K_Z());
        if (a.emit_delta) rec.matrix("Delta", sol.Delta);
        return kExitOk;
    }
    throw Error(Errc::InvalidArgument, "weighted mode needs a single-state model and the auto, gaussian or discrete solver");
}

}  // namespace

int run_solve(const Globals& g, const SolveArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const LoadedModel model = load_model_file(a.model);
        Record rec;
        if (a.D_bar) {
            const int rc = solve_weighted(g, a, model, rec);
            rec.write(out, g.json);
            return rc;
        }
        const double D_o = a.D_o.value_or(kInf);
        SolverKind kind = parse_solver_kind(a.solver);

        if (is_discrete(model)) {
            if (kind != SolverKind::Auto && kind != SolverKind::Discrete)
                throw Error(Errc::InvalidArgument, "discrete sources need the discrete solver");
            DiscreteRdfSolution sol;
            if (model.discrete) {
                const auto ds = state_budgets(a.D_s, 1);
                sol = solve_discrete_rdf(*model.discrete, {ds[0], D_o}, discrete_options(g));
            } else {
                const auto ds = state_budgets(a.D_s, model.multi_discrete->num_states());
                sol = solve_discrete_rdf_multi(*model.multi_discrete, {ds, D_o}, discrete_options(g));
            }
            rec.str("solver", "discrete");
            rec.str("unit", unit_name(g));
            discrete_record(rec, g, sol);
            rec.write(out, g.json);
            return kExitOk;
        }

        if (!model.gaussian) {
            if (kind == SolverKind::Waterfill || kind == SolverKind::Discrete)
                throw Error(Errc::InvalidArgument, "multi-state Gaussian models need the gaussian solver");
            const auto ds = state_budgets(a.D_s, model.multi_gaussian->num_states());
            const auto sol = solve_gaussian_rdf_multi(*model.multi_gaussian, {ds, D_o}, gaussian_options(g));
            rec.str("solver", "gaussian");
            rec.str("unit", unit_name(g));
            gaussian_record(rec, g, sol, false);
            if (a.emit_delta) rec.matrix("Delta", sol.Delta);
            rec.write(out, g.json);
            return kExitOk;
        }

        const GaussianSemanticModel& gm = *model.gaussian;
        const double D_s = state_budgets(a.D_s, 1)[0];
        kind = resolve_solver(model, kind);
        rec.str("solver", std::string(to_string(kind)));
        rec.str("unit", unit_name(g));
        Matrix delta;
        if (kind == SolverKind::Waterfill) {
            const SpectralModel sp = *spectral_of(model);
            const WaterfillSolution sol = waterfill_solve(sp, D_s, D_o);
            delta = delta_matrix(sp, sol.delta);
            const bool obs = sol.region == Region::A1 || sol.region == Region::A3;
            const bool state = sol.region == Region::A2 || sol.region == Region::A3;
            rec.num("rate", in_unit(g, sol.rate));
            rec.str("region", std::string(to_string(sol.region)));
            rec.num("lambda", sol.lambda);
            rec.nums("mu", {sol.mu});
            rec.flag("obs_active", obs);
            rec.flags("state_active", {state});
            rec.num("achieved_D_o", sol.delta.sum());
            rec.num("achieved_D_s", sp.alpha.dot(sol.delta) + sp.tr_KZ);
            if (a.emit_delta) {
                rec.nums("delta", std::vector<double>(sol.delta.data(), sol.delta.data() + sol.delta.size()));
                rec.matrix("Delta", delta);
            }
        } else {
            const GaussianRdfSolution sol = solve_gaussian_rdf(gm, {D_s, D_o}, gaussian_options(g));
            gaussian_record(rec, g, sol, true);
            rec.num("achieved_D_s", (gm.H() * sol.Delta * gm.H().transpose()).trace() + gm.trace_K_Z());
            if (a.emit_delta) {
                rec.matrix("Delta", sol.Delta);
                rec.matrix("Psi", sol.psi);
            }
        }
        rec.write(out, g.json);
        return kExitOk;
    });
}

int run_sweep(const Globals& g, const SweepArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (a.ds_range.size() != 3 || a.do_range.size() != 3)
            throw Error(Errc::InvalidArgument, "ranges take min,max,steps");
        auto steps = [](double v) {
            if (v != std::floor(v) || v < 2 || v > 1e6) throw Error(Errc::InvalidArgument, "steps must be an integer >= 2");
            return static_cast<int>(v);
        };
        SweepSpec spec;
        spec.ds_min = a.ds_range[0];
        spec.ds_max = a.ds_range[1];
        spec.ds_steps = steps(a.ds_range[2]);
        spec.do_min = a.do_range[0];
        spec.do_max = a.do_range[1];
        spec.do_steps = steps(a.do_range[2]);
        spec.solver = parse_solver_kind(a.solver);
        const LoadedModel model = load_model_file(a.model);
        const SweepResult res = semrd::run_sweep(model, spec);
        with_output(a.out, out, [&](std::ostream& o) { write_sweep_csv(o, res, g.bits); });
        if (res.any_failed) {
            err << "error: some cells failed to converge (rate nan)\n";
            return kExitSolver;
        }
        return kExitOk;
    });
}

int run_curves(const Globals&, const CurvesArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (a.n_points < 2) throw Error(Errc::InvalidArgument, "--points must be at least 2");
        const LoadedModel model = load_model_file(a.model);
        if (!model.gaussian) throw Error(Errc::InvalidArgument, "curves need a single-state Gaussian model");
        const auto sp = spectral_of(model);
        if (!sp) throw Error(Errc::NotDiagonalizable, "K_X and H^T H do not commute");
        // Water levels from the largest eigenvalue down to 1e-4 of the smallest.
        const double top = sp->sigma.maxCoeff();
        const double span = 1e4 * top / sp->sigma.minCoeff();
        double top_o = 0.0;
        for (Eigen::Index j = 0; j < sp->q_rank; ++j) top_o = std::max(top_o, sp->sigma(j) * sp->alpha(j));
        const int n = a.n_points;
        with_output(a.out, out, [&](std::ostream& o) {
            o << "curve,parameter,D_s,D_o\n";
            o << "corner,0," << format_number(sp->state_ceiling()) << ',' << format_number(sp->trace_K_X()) << '\n';
            for (int k = 0; k < n; ++k) {
                const double lambda = std::pow(span, static_cast<double>(k) / (n - 1)) / top;
                const auto [ds, dob] = curve_cs(*sp, lambda);
                o << "C_s," << format_number(lambda) << ',' << format_number(ds) << ',' << format_number(dob) << '\n';
            }
            if (top_o > 0.0)
                for (int k = 0; k < n; ++k) {
                    const double mu = std::pow(span, static_cast<double>(k) / (n - 1)) / top_o;
                    const auto [ds, dob] = curve_co(*sp, mu);
                    o << "C_o," << format_number(mu) << ',' << format_number(ds) << ',' << format_number(dob) << '\n';
                }
        });
        return kExitOk;
    });
}

int run_waterlevels(const Globals& g, const WaterlevelsArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const LoadedModel model = load_model_file(a.model);
        if (!model.gaussian) throw Error(Errc::InvalidArgument, "water levels need a single-state Gaussian model");
        const auto sp = spectral_of(model);
        if (!sp) throw Error(Errc::NotDiagonalizable, "K_X and H^T H do not commute");
        const auto points = parse_points(read_text_file(a.points));
        const bool circulant = !sp->frequency.empty();
        std::vector<Eigen::Index> order(static_cast<std::size_t>(sp->size()));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        if (circulant)
            std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
                return sp->frequency[static_cast<std::size_t>(x)] < sp->frequency[static_cast<std::size_t>(y)];
            });
        std::vector<WaterfillSolution> sols;
        for (std::size_t p = 0; p < points.size(); ++p) {
            try {
                sols.push_back(waterfill_solve(*sp, points[p].first, points[p].second));
            } catch (const Error& e) {
                throw Error(e.code(), "point " + std::to_string(p) + ": " + e.what());
            }
        }
        const double m = static_cast<double>(sp->size());
        with_output(a.out, out, [&](std::ostream& o) {
            o << "# rate unit: " << unit_name(g) << '\n';
            o << "point,D_s,D_o,region,rate,j,sigma,alpha,delta" << (circulant ? ",frequency" : "") << '\n';
            for (std::size_t p = 0; p < points.size(); ++p) {
                const auto& sol = sols[p];
                for (const Eigen::Index k : order) {
                    const Eigen::Index j = circulant ? sp->frequency[static_cast<std::size_t>(k)] : k;
                    o << p << ',' << format_number(points[p].first) << ',' << format_number(points[p].second) << ','
                      << to_string(sol.region) << ',' << format_number(in_unit(g, sol.rate)) << ',' << j << ','
                      << format_number(sp->sigma(k)) << ',' << format_number(sp->alpha(k)) << ','
                      << format_number(sol.delta(k));
                    if (circulant) o << ',' << format_number(2.0 * std::numbers::pi * static_cast<double>(j) / m);
                    o << '\n';
                }
            }
        });
        return kExitOk;
    });
}

int run_discrete(const Globals& g, const DiscreteArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const LoadedModel model = load_model_file(a.model);
        if (!is_discrete(model)) throw Error(Errc::InvalidArgument, "the discrete command needs a discrete source");
        const MultiStateDiscreteSource src =
            model.multi_discrete ? *model.multi_discrete : MultiStateDiscreteSource::from_single(*model.discrete);
        const MultiBudget budget{state_budgets(a.D_s, src.num_states()), a.D_o.value_or(kInf)};
        const DiscreteRdfSolution sol = model.discrete && src.num_states() == 1
                                            ? solve_discrete_rdf(*model.discrete, {budget.D_s[0], budget.D_o},
                                                                 discrete_options(g))
                                            : solve_discrete_rdf_multi(src, budget, discrete_options(g));
        Record rec;
        rec.str("solver", "discrete");
        rec.str("unit", unit_name(g));
        discrete_record(rec, g, sol);
        if (a.oracle_steps > 0) {
            const double oracle = exhaustive_discrete_oracle_multi(src, budget, a.oracle_steps);
            rec.num("oracle_rate", in_unit(g, oracle));
            rec.num("oracle_difference", in_unit(g, sol.rate - oracle));
        }
        if (a.emit_conditional) rec.matrix("conditional_pmf", sol.conditional_pmf);
        rec.write(out, g.json);
        return kExitOk;
    });
}

int run_verify(const Globals& g, const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const LoadedModel model = load_model_file(a.model);
        if (!model.gaussian) throw Error(Errc::InvalidArgument, "verify needs a single-state Gaussian model");
        if (a.samples < 2) throw Error(Errc::InvalidArgument, "--samples must be at least 2");
        const GaussianSemanticModel& gm = *model.gaussian;
        const GaussianRdfSolution sol = solve_gaussian_rdf(gm, {a.D_s, a.D_o}, gaussian_options(g));
        const TestChannel ch = build_test_channel(gm, sol.Delta);
        const ChannelDistortions cf = closed_form_distortions(ch);
        const MonteCarloEstimate mc = monte_carlo_distortions(ch, a.samples, g.seed);
        const double target_o = sol.Delta.trace();
        const double target_s = (gm.H() * sol.Delta * gm.H().transpose()).trace() + gm.trace_K_Z();
        const bool ok = std::abs(mc.Do_hat - target_o) <= 3.0 * mc.Do_se && std::abs(mc.Ds_hat - target_s) <= 3.0 * mc.Ds_se;
        Record rec;
        rec.str("unit", unit_name(g));
        rec.num("rate", in_unit(g, sol.rate));
        rec.num("test_channel_rate", in_unit(g, rate_of_test_channel(gm, sol.Delta)));
        rec.str("region", std::string(to_string(sol.region)));
        rec.num("noise_cov_min_eig", lemma2_psd_check(sol.Delta, gm.K_X()));
        rec.num("target_D_o", target_o);
        rec.num("target_D_s", target_s);
        rec.num("closed_form_D_o", cf.D_o);
        rec.num("closed_form_D_s", cf.D_s);
        rec.num("mc_D_o", mc.Do_hat);
        rec.num("mc_D_o_se", mc.Do_se);
        rec.num("mc_D_s", mc.Ds_hat);
        rec.num("mc_D_s_se", mc.Ds_se);
        rec.integer("samples", static_cast<long>(mc.samples));
        rec.integer("seed", static_cast<long>(g.seed));
        rec.flag("within_3se", ok);
        rec.write(out, g.json);
        return kExitOk;
    });
}

int run_gen(const Globals& g, const GenArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        std::string text;
        if (a.which == "toy") {
            text = gaussian_model_json(presets::toy_model());
        } else if (a.which == "circulant") {
            text = circulant_model_json(presets::circulant_rows());
        } else if (a.which == "circulant-dense") {
            const auto rows = presets::circulant_rows();
            text = gaussian_model_json(validate_gaussian_model(circulant_matrix(rows.kx_first_row),
                                                               circulant_matrix(rows.h_first_row),
                                                               Matrix::Zero(128, 128)));
        } else if (a.which == "sparse") {
            text = gaussian_model_json(presets::sparse_model(g.seed));
        } else if (a.which == "binary") {
            text = discrete_model_json(presets::binary_source());
        } else {
            throw Error(Errc::InvalidArgument, "unknown preset '" + a.which + "'");
        }
        with_output(a.out, out, [&](std::ostream& o) { o << text; });
        return kExitOk;
    });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Semantic rate-distortion functions: solve, sweep and verify."};
    app.name("semrd");
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    std::string unit = "nats";
    double tol = 0.0;
    app.add_option("--unit", unit, "Rate unit")->check(CLI::IsMember({"nats", "bits"}));
    auto* tol_opt = app.add_option("--tol", tol, "Solver tolerance (interior-point gap, discrete budget match)")
                        ->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "Seed for Monte Carlo and generated models");
    app.add_flag("--json", g.json, "Machine-readable single-solution output");

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Rate at one (D_s, D_o) point");
    solve->add_option("model", sa.model, "Model file (JSON)")->required();
    solve->add_option("--ds", sa.D_s, "State budget(s), one per intrinsic state")->delimiter(',');
    solve->add_option("--do", sa.D_o, "Observation budget");
    solve->add_option("--solver", sa.solver, "auto, gaussian, waterfill or discrete")
        ->check(CLI::IsMember({"auto", "gaussian", "waterfill", "discrete"}));
    solve->add_flag("--emit-delta", sa.emit_delta, "Print the optimal Delta");
    solve->add_option("--weights", sa.weights, "w_s,w_o for the weighted budget")->delimiter(',');
    solve->add_option("--dbar", sa.D_bar, "Weighted budget w_s D_s + w_o D_o <= D_bar");

    SweepArgs wa;
    auto* sweep = app.add_subcommand("sweep", "Rate surface over a (D_s, D_o) grid as CSV");
    sweep->add_option("model", wa.model, "Model file (JSON)")->required();
    sweep->add_option("--ds", wa.ds_range, "min,max,steps")->delimiter(',')->required();
    sweep->add_option("--do", wa.do_range, "min,max,steps")->delimiter(',')->required();
    sweep->add_option("--solver", wa.solver, "auto, gaussian, waterfill or discrete")
        ->check(CLI::IsMember({"auto", "gaussian", "waterfill", "discrete"}));
    sweep->add_option("-o,--out", wa.out, "Output CSV (default: standard output)");

    CurvesArgs ca;
    auto* curves = app.add_subcommand("curves", "Region boundary curves C_s and C_o as CSV");
    curves->add_option("model", ca.model, "Model file (JSON)")->required();
    curves->add_option("--points", ca.n_points, "Points per curve");
    curves->add_option("-o,--out", ca.out, "Output CSV");

    WaterlevelsArgs la;
    auto* levels = app.add_subcommand("waterlevels", "Per-coordinate water-filling profiles as CSV");
    levels->add_option("model", la.model, "Model file (JSON)")->required();
    levels->add_option("--points", la.points, "File of D_s,D_o pairs (CSV lines or JSON)")->required();
    levels->add_option("-o,--out", la.out, "Output CSV");

    DiscreteArgs da;
    auto* disc = app.add_subcommand("discrete", "Finite-alphabet semantic rate-distortion function");
    disc->add_option("model", da.model, "Model file (JSON)")->required();
    disc->add_option("--ds", da.D_s, "State budget(s)")->delimiter(',');
    disc->add_option("--do", da.D_o, "Observation budget");
    disc->add_option("--oracle", da.oracle_steps, "Also run the brute-force grid oracle with this many steps")
        ->check(CLI::Range(0, 20));
    disc->add_flag("--emit-conditional", da.emit_conditional, "Print the optimal conditional pmf");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Test-channel and Monte Carlo check of a Gaussian solution");
    verify->add_option("model", va.model, "Model file (JSON)")->required();
    verify->add_option("--ds", va.D_s, "State budget")->required();
    verify->add_option("--do", va.D_o, "Observation budget")->required();
    verify->add_option("--samples", va.samples, "Monte Carlo sample count");

    GenArgs ga;
    auto* gen = app.add_subcommand("gen", "Write a built-in model file");
    gen->add_option("which", ga.which, "toy, circulant, circulant-dense, sparse or binary")
        ->required()
        ->check(CLI::IsMember({"toy", "circulant", "circulant-dense", "sparse", "binary"}));
    gen->add_option("-o,--out", ga.out, "Output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitInput;
    }
    g.bits = unit == "bits";
    if (tol_opt->count() > 0) g.tol = tol;

    if (solve->parsed()) return run_solve(g, sa, out, err);
    if (sweep->parsed()) return run_sweep(g, wa, out, err);
    if (curves->parsed()) return run_curves(g, ca, out, err);
    if (levels->parsed()) return run_waterlevels(g, la, out, err);
    if (disc->parsed()) return run_discrete(g, da, out, err);
    if (verify->parsed()) return run_verify(g, va, out, err);
    return run_gen(g, ga, out, err);
}

}  // namespace semrd::cli
