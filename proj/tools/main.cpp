#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "disent/checks.hpp"
#include "disent/config.hpp"
#include "disent/errors.hpp"
#include "disent/io.hpp"

namespace {

using namespace disent;
using nlohmann::json;

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct System {
    OccupationBasis basis;
    ComplexMatrix h;
    PairList pairs;
    std::vector<OperatorMatrix> number_ops;
    std::vector<int> block_ids;
    ObservableLayout layout;
};

System make_system(const ModelSpec& model) {
    System sys{model_basis(model), {}, interaction_pairs(model), {}, {}, {}};
    sys.h = build_hamiltonian(model, sys.basis);
    for (int m = 0; m < sys.basis.modes(); ++m)
        sys.number_ops.push_back(number_matrix(sys.basis, m));
    sys.block_ids.resize(sys.basis.dim());
    for (int i = 0; i < sys.basis.dim(); ++i) sys.block_ids[i] = sys.basis.block_key(i);
    sys.layout = ObservableLayout{std::abs(model.interaction),
                                  model.statistics == ParticleKind::Fermion};
    return sys;
}

DensityMatrix initial_density(const RunConfig& cfg, const System& sys) {
    switch (cfg.initial.kind) {
        case InitialState::Kind::Ground: {
            const EighResult es = eigh(sys.h);
            ComplexMatrix rho(sys.basis.dim());
            for (int i = 0; i < sys.basis.dim(); ++i)
                for (int j = 0; j < sys.basis.dim(); ++j)
                    rho(i, j) = es.vectors(i, 0) * std::conj(es.vectors(j, 0));
            return DensityMatrix{std::move(rho)};
        }
        case InitialState::Kind::Fock: {
            if (cfg.initial.fock_index < 0 || cfg.initial.fock_index >= sys.basis.dim())
                throw ValidationError("initial fock index out of range");
            ComplexMatrix rho(sys.basis.dim());
            rho(cfg.initial.fock_index, cfg.initial.fock_index) = 1.0;
            return DensityMatrix{std::move(rho)};
        }
        case InitialState::Kind::Thermal:
        default:
            return thermal_state(sys.h, cfg.dynamics.beta);
    }
}

json meta_base(const RunConfig& cfg, const std::string& command, double wall_seconds) {
    json meta;
    meta["command"] = command;
    meta["resolved_config"] = json::parse(resolved_config_json(cfg));
    meta["applied_defaults"] = cfg.applied_defaults;
    meta["wall_time_seconds"] = wall_seconds;
    return meta;
}

int cmd_check() {
    const auto items = run_closed_form_checks();
    int failures = 0;
    std::printf("%-62s %-12s %-10s %s\n", "check", "residual", "tolerance", "status");
    for (const auto& it : items) {
        if (!it.pass) ++failures;
        std::printf("%-62s %-12.3e %-10.1e %s\n", it.name.c_str(), it.residual, it.tolerance,
                    it.pass ? "pass" : "FAIL");
    }
    std::printf("%zu checks, %d failures\n", items.size(), failures);
    return failures == 0 ? 0 : 1;
}

int cmd_evolve(const std::string& config_path, const std::string& out_dir) {
    RunConfig cfg = parse_config(slurp(config_path));
    if (cfg.sweep)
        throw ValidationError("evolve takes a config without a sweep section; use `sweep`");
    const System sys = make_system(cfg.model);
    const DensityMatrix rho0 = initial_density(cfg, sys);

    const auto start = std::chrono::steady_clock::now();
    const EvolveOutcome out =
        evolve(rho0, sys.h, cfg.dynamics, sys.pairs, sys.number_ops, cfg.output.record_every,
               sys.layout, &sys.block_ids);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir + "/trajectory.csv",
                    trajectory_csv(out.trajectory, sys.basis.modes(), sys.pairs));

    json meta = meta_base(cfg, "evolve", wall);
    meta["termination"] = to_string(out.reason);
    meta["final_residual"] = out.final_residual;
    meta["final_time"] = out.final_time;
    meta["steps"] = out.steps;
    meta["monitor"] = {{"max_trace_drift", out.monitor.max_trace_drift},
                       {"max_herm_residual", out.monitor.max_herm_residual},
                       {"min_purity", out.monitor.min_purity},
                       {"max_purity", out.monitor.max_purity},
                       {"max_block_leakage", out.monitor.max_block_leakage},
                       {"min_energy", out.monitor.min_energy},
                       {"max_energy", out.monitor.max_energy}};
    write_text_file(out_dir + "/meta.json", meta.dump(2) + "\n");
    std::printf("evolve: %s after %lld steps (t=%s, residual=%.3e)\n",
                to_string(out.reason).c_str(), out.steps, format_double(out.final_time).c_str(),
                out.final_residual);
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              std::optional<uint64_t> seed_override, bool no_continuation) {
    RunConfig cfg = parse_config(slurp(config_path));
    if (!cfg.sweep) throw ValidationError("sweep requires a config with a sweep section");
    SweepSpec spec = *cfg.sweep;
    if (seed_override) spec.seed = *seed_override;
    if (no_continuation) spec.continuation = false;

    const System sys = make_system(cfg.model);
    const auto start = std::chrono::steady_clock::now();
    const SweepResult result = sweep(spec, sys.h, sys.pairs, sys.number_ops);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir + "/sweep.csv", sweep_csv(result, sys.basis.modes()));

    cfg.sweep = spec;  // echo the effective seed/continuation
    json meta = meta_base(cfg, "sweep", wall);
    if (result.critical_estimate)
        meta["critical_estimate"] = *result.critical_estimate;
    else
        meta["critical_estimate"] = nullptr;
    size_t converged = 0;
    json reasons = json::array();
    for (const auto& p : result.points) {
        if (p.converged) ++converged;
        reasons.push_back({{"control", p.control},
                           {"termination", to_string(p.reason)},
                           {"residual", p.residual}});
    }
    meta["points"] = reasons;
    meta["converged_points"] = converged;
    write_text_file(out_dir + "/meta.json", meta.dump(2) + "\n");

    const double frac = static_cast<double>(converged) / result.points.size();
    if (result.critical_estimate)
        std::printf("sweep: %zu/%zu points converged, critical estimate %s\n", converged,
                    result.points.size(), format_double(*result.critical_estimate).c_str());
    else
        std::printf("sweep: %zu/%zu points converged, no transition detected\n", converged,
                    result.points.size());
    return frac >= 0.9 ? 0 : 1;
}

int cmd_basis(const std::string& config_path, const std::string& operator_name) {
    RunConfig cfg = parse_config(slurp(config_path));
    const System sys = make_system(cfg.model);
    std::printf("# %d modes, dim %d\n", sys.basis.modes(), sys.basis.dim());
    for (int i = 0; i < sys.basis.dim(); ++i)
        std::printf("%4d  %s\n", i, sys.basis.label(i).c_str());

    if (!operator_name.empty()) {
        ComplexMatrix op;
        if (operator_name == "H") {
            op = sys.h;
        } else if (operator_name.size() > 1 && operator_name[0] == 'N') {
            const int mode = std::stoi(operator_name.substr(1));
            if (mode < 0 || mode >= sys.basis.modes())
                throw ValidationError("operator mode index out of range");
            op = sys.number_ops[mode];
        } else {
            throw ValidationError("unknown operator '" + operator_name + "' (H or N<mode>)");
        }
        std::printf("# operator %s\n", operator_name.c_str());
        for (int i = 0; i < op.dim(); ++i) {
            std::string row;
            for (int j = 0; j < op.dim(); ++j) {
                const cplx v = op(i, j);
                row += format_double(v.real());
                if (v.imag() != 0.0) row += (v.imag() > 0 ? "+" : "") + format_double(v.imag()) + "i";
                row += j + 1 < op.dim() ? " " : "";
            }
            std::printf("%s\n", row.c_str());
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlinear disentanglement master-equation simulator for Hubbard rings"};
    app.require_subcommand(1);

    auto* check = app.add_subcommand("check", "run the analytic-oracle suite");

    std::string config_path, out_dir = ".", operator_name;
    auto* ev = app.add_subcommand("evolve", "integrate one trajectory");
    ev->add_option("--config", config_path, "config file")->required();
    ev->add_option("--out", out_dir, "output directory")->required();

    std::optional<uint64_t> seed_override;
    bool no_continuation = false;
    auto* sw = app.add_subcommand("sweep", "steady-state control-parameter sweep");
    sw->add_option("--config", config_path, "config file")->required();
    sw->add_option("--out", out_dir, "output directory")->required();
    sw->add_option("--seed", seed_override, "override the sweep seed");
    sw->add_flag("--no-continuation", no_continuation, "independent point initialization");

    auto* ba = app.add_subcommand("basis", "print the occupation basis");
    ba->add_option("--config", config_path, "config file")->required();
    ba->add_option("--operator", operator_name, "dump an operator matrix (H or N<mode>)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check();
        if (ev->parsed()) return cmd_evolve(config_path, out_dir);
        if (sw->parsed()) return cmd_sweep(config_path, out_dir, seed_override, no_continuation);
        if (ba->parsed()) return cmd_basis(config_path, operator_name);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
