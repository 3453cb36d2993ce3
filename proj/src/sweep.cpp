#include "semrd/sweep.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <ostream>
#include <thread>

#include "semrd/discrete.hpp"
#include "semrd/verify.hpp"

namespace semrd {

SolverKind parse_solver_kind(const std::string& name) {
    if (name == "auto") return SolverKind::Auto;
    if (name == "gaussian") return SolverKind::Gaussian;
    if (name == "waterfill") return SolverKind::Waterfill;
    if (name == "discrete") return SolverKind::Discrete;
    throw Error(Errc::InvalidArgument, "unknown solver '" + name + "'");
}

std::string_view to_string(SolverKind kind) noexcept {
    switch (kind) {
        case SolverKind::Auto: return "auto";
        case SolverKind::Gaussian: return "gaussian";
        case SolverKind::Waterfill: return "waterfill";
        case SolverKind::Discrete: return "discrete";
    }
    return "?";
}

void validate_sweep_spec(const SweepSpec& s) {
    if (s.ds_steps < 2 || s.do_steps < 2) throw Error(Errc::InvalidArgument, "sweep needs at least 2 steps per axis");
    if (!(s.ds_min < s.ds_max) || !(s.do_min < s.do_max))
        throw Error(Errc::InvalidArgument, "sweep ranges need min < max");
    if (!std::isfinite(s.ds_min) || !std::isfinite(s.ds_max) || !std::isfinite(s.do_min) || !std::isfinite(s.do_max))
        throw Error(Errc::InvalidArgument, "sweep ranges must be finite");
}

std::vector<double> linspace(double lo, double hi, int steps) {
    std::vector<double> v(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
        v[static_cast<std::size_t>(i)] = i + 1 == steps ? hi : lo + (hi - lo) * i / (steps - 1);
    return v;
}

std::optional<SpectralModel> spectral_of(const LoadedModel& model) {
    if (!model.gaussian) return std::nullopt;
    if (model.circulant)
        return circulant_spectral(model.circulant->kx_first_row, model.circulant->h_first_row, model.gaussian->trace_K_Z());
    return simultaneous_diagonalize(*model.gaussian);
}

SolverKind resolve_solver(const LoadedModel& model, SolverKind requested) {
    const bool gaussian = model.gaussian.has_value();
    const bool discrete = model.discrete.has_value();
    switch (requested) {
        case SolverKind::Auto:
            if (discrete) return SolverKind::Discrete;
            if (!gaussian) throw Error(Errc::InvalidArgument, "multi-state models are not supported here");
            return spectral_of(model) ? SolverKind::Waterfill : SolverKind::Gaussian;
        case SolverKind::Waterfill:
            if (!gaussian) throw Error(Errc::InvalidArgument, "waterfill needs a single-state Gaussian model");
            if (!spectral_of(model)) throw Error(Errc::NotDiagonalizable, "K_X and H^T H do not commute");
            return requested;
        case SolverKind::Gaussian:
            if (!gaussian) throw Error(Errc::InvalidArgument, "the interior-point solver needs a single-state Gaussian model");
            return requested;
        case SolverKind::Discrete:
            if (!discrete) throw Error(Errc::InvalidArgument, "the discrete solver needs a single-state discrete source");
            return requested;
    }
    return requested;
}

namespace {

void solve_cell(const LoadedModel& model, SolverKind kind, const std::optional<SpectralModel>& sp, SweepCell& cell) {
    try {
        switch (kind) {
            case SolverKind::Waterfill: {
                const WaterfillSolution sol = waterfill_solve(*sp, cell.D_s, cell.D_o);
                cell.rate = sol.rate;
                cell.region = std::string(to_string(sol.region));
                break;
            }
            case SolverKind::Gaussian: {
                const GaussianRdfSolution sol = solve_gaussian_rdf(*model.gaussian, {cell.D_s, cell.D_o});
                cell.rate = sol.rate;
                cell.region = std::string(to_string(sol.region));
                cell.iterations = sol.newton_iterations;
                break;
            }
            case SolverKind::Discrete:
            case SolverKind::Auto: {
                const DiscreteRdfSolution sol = solve_discrete_rdf(*model.discrete, {cell.D_s, cell.D_o});
                cell.rate = sol.rate;
                cell.region = std::string(to_string(region_from_activity(sol.state_active[0], sol.obs_active)));
                cell.iterations = sol.iterations;
                break;
            }
        }
    } catch (const Error& e) {
        if (e.is_infeasible()) {
            cell.rate = kInf;
            cell.region = "none";
        } else {
            cell.rate = std::nan("");
            cell.region = "fail";
        }
    }
}

}  // namespace

SweepResult run_sweep(const LoadedModel& model, const SweepSpec& spec, unsigned workers) {
    validate_sweep_spec(spec);
    SweepResult res;
    res.solver = resolve_solver(model, spec.solver);
    std::optional<SpectralModel> sp;
    if (res.solver == SolverKind::Waterfill) sp = spectral_of(model);
    const auto ds = linspace(spec.ds_min, spec.ds_max, spec.ds_steps);
    const auto dob = linspace(spec.do_min, spec.do_max, spec.do_steps);
    res.cells.resize(ds.size() * dob.size());
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t k = 0; k < dob.size(); ++k) {
            SweepCell& c = res.cells[i * dob.size() + k];
            c.D_s = ds[i];
            c.D_o = dob[k];
        }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx = next++; idx < res.cells.size(); idx = next++) solve_cell(model, res.solver, sp, res.cells[idx]);
    };
    const unsigned nw = std::max(1u, std::min<unsigned>(workers == 0 ? default_worker_count() : workers,
                                                        static_cast<unsigned>(res.cells.size())));
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < nw; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& c : res.cells)
        if (c.region == "fail") res.any_failed = true;
    return res;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result, bool bits) {
    out << "# rate unit: " << (bits ? "bits" : "nats") << "\n";
    out << "D_s,D_o,rate,region\n";
    for (const auto& c : result.cells) {
        const double rate = bits ? c.rate / std::numbers::ln2 : c.rate;
        out << format_number(c.D_s) << ',' << format_number(c.D_o) << ',' << format_number(rate) << ',' << c.region << '\n';
    }
}

}  // namespace semrd
