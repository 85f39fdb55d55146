#include "disent/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "disent/errors.hpp"

namespace disent {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& scope,
                    const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ParseError("unknown key '" + scope + it.key() + "'");
}

template <typename T>
T require(const json& obj, const std::string& scope, const std::string& key) {
    if (!obj.contains(key)) throw ParseError("missing key '" + scope + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError("bad value for key '" + scope + key + "'");
    }
}

template <typename T>
std::optional<T> optional_of(const json& obj, const std::string& scope, const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError("bad value for key '" + scope + key + "'");
    }
}

std::vector<double> control_grid(const json& node) {
    std::vector<double> grid;
    if (node.is_array()) {
        grid = node.get<std::vector<double>>();
    } else if (node.is_object()) {
        reject_unknown(node, "sweep.control.", {"start", "stop", "step"});
        const double start = require<double>(node, "sweep.control.", "start");
        const double stop = require<double>(node, "sweep.control.", "stop");
        const double step = require<double>(node, "sweep.control.", "step");
        if (!(step > 0.0)) throw ParseError("bad value for key 'sweep.control.step'");
        for (double c = start; c <= stop + 0.5 * step; c += step) grid.push_back(c);
    } else {
        throw ParseError("bad value for key 'sweep.control'");
    }
    if (grid.empty()) throw ParseError("empty grid for key 'sweep.control'");
    for (size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1]) throw ParseError("'sweep.control' must be strictly monotone");
    return grid;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("configuration is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("configuration root must be an object");
    reject_unknown(doc, "", {"model", "dynamics", "sweep", "output"});
    if (!doc.contains("model")) throw ParseError("missing key 'model'");

    RunConfig cfg;
    auto note_default = [&](const std::string& line) { cfg.applied_defaults.push_back(line); };

    // model
    {
        const json& m = doc.at("model");
        reject_unknown(m, "model.", {"statistics", "L", "t", "U", "sector", "cap", "pairs"});
        const std::string stats = require<std::string>(m, "model.", "statistics");
        if (stats == "boson")
            cfg.model.statistics = ParticleKind::Boson;
        else if (stats == "fermion")
            cfg.model.statistics = ParticleKind::Fermion;
        else
            throw ParseError("bad value for key 'model.statistics' (boson|fermion)");
        cfg.model.sites = require<int>(m, "model.", "L");
        cfg.model.hopping = require<double>(m, "model.", "t");
        cfg.model.interaction = require<double>(m, "model.", "U");
        cfg.model.sector = optional_of<int>(m, "model.", "sector");
        cfg.model.boson_cap = optional_of<int>(m, "model.", "cap");
        if (auto pairs = optional_of<std::vector<std::vector<int>>>(m, "model.", "pairs")) {
            std::vector<std::pair<int, int>> pl;
            for (const auto& p : *pairs) {
                if (p.size() != 2) throw ParseError("bad value for key 'model.pairs'");
                pl.emplace_back(p[0], p[1]);
            }
            cfg.model.pair_override = std::move(pl);
        }

        if (cfg.model.sites < 2) throw ValidationError("model.L must be >= 2");
        if (!std::isfinite(cfg.model.hopping) || !std::isfinite(cfg.model.interaction))
            throw ValidationError("model.t and model.U must be finite");
        if (cfg.model.interaction == 0.0)
            throw ValidationError("model.U must be nonzero (energies are reported as <H>/|U|)");
        if (cfg.model.statistics == ParticleKind::Boson && !cfg.model.sector &&
            !cfg.model.boson_cap)
            throw ValidationError("bosonic model needs 'model.sector' or 'model.cap'");
        if (cfg.model.statistics == ParticleKind::Boson && cfg.model.sector &&
            !cfg.model.boson_cap)
            note_default("model.cap = sector particle number");
    }

    // dynamics
    {
        json dyn = doc.contains("dynamics") ? doc.at("dynamics") : json::object();
        reject_unknown(dyn, "dynamics.", {"beta", "gamma_h", "gamma_d", "dt", "t_max",
                                          "eig_floor", "ss_tol", "initial_state"});
        const double u_abs = std::abs(cfg.model.interaction);
        if (auto b = optional_of<double>(dyn, "dynamics.", "beta")) {
            cfg.dynamics.beta = *b;
        } else {
            cfg.dynamics.beta = 100.0 / u_abs;
            note_default("dynamics.beta = 100/|U| (beta*|U| = 100)");
        }
        if (auto g = optional_of<double>(dyn, "dynamics.", "gamma_h")) {
            cfg.dynamics.gamma_h = *g;
        } else {
            cfg.dynamics.gamma_h = 1.0;
            note_default("dynamics.gamma_h = 1");
        }
        if (auto g = optional_of<double>(dyn, "dynamics.", "gamma_d")) {
            cfg.dynamics.gamma_d = *g;
        } else {
            cfg.dynamics.gamma_d = 0.0;
            note_default("dynamics.gamma_d = 0");
        }
        if (auto v = optional_of<double>(dyn, "dynamics.", "dt")) {
            cfg.dynamics.dt = *v;
        } else {
            cfg.dynamics.dt = 0.0;
            note_default("dynamics.dt = auto");
        }
        if (auto v = optional_of<double>(dyn, "dynamics.", "t_max")) {
            cfg.dynamics.t_max = *v;
        } else {
            cfg.dynamics.t_max = 50.0;
            note_default("dynamics.t_max = 50");
        }
        if (auto v = optional_of<double>(dyn, "dynamics.", "eig_floor")) {
            cfg.dynamics.eig_floor = *v;
        } else {
            cfg.dynamics.eig_floor = 1e-14;
            note_default("dynamics.eig_floor = 1e-14");
        }
        if (auto v = optional_of<double>(dyn, "dynamics.", "ss_tol")) {
            cfg.dynamics.ss_tol = *v;
        } else {
            cfg.dynamics.ss_tol = 0.0;
            note_default("dynamics.ss_tol = auto");
        }
        try {
            cfg.dynamics.validate();
        } catch (const ParameterError& e) {
            throw ValidationError(std::string("dynamics: ") + e.what());
        }

        if (auto init = optional_of<std::string>(dyn, "dynamics.", "initial_state")) {
            if (*init == "thermal") {
                cfg.initial.kind = InitialState::Kind::Thermal;
            } else if (*init == "ground") {
                cfg.initial.kind = InitialState::Kind::Ground;
            } else if (init->rfind("fock:", 0) == 0) {
                cfg.initial.kind = InitialState::Kind::Fock;
                try {
                    cfg.initial.fock_index = std::stoi(init->substr(5));
                } catch (...) {
                    throw ParseError("bad value for key 'dynamics.initial_state'");
                }
            } else {
                throw ParseError(
                    "bad value for key 'dynamics.initial_state' (thermal|ground|fock:<k>)");
            }
        } else {
            note_default("dynamics.initial_state = thermal");
        }
    }

    // sweep
    if (doc.contains("sweep")) {
        const json& sw = doc.at("sweep");
        reject_unknown(sw, "sweep.",
                       {"control", "continuation", "xi", "seed", "threshold_fraction"});
        SweepSpec spec;
        spec.model = cfg.model;
        spec.params = cfg.dynamics;
        if (!sw.contains("control")) throw ParseError("missing key 'sweep.control'");
        spec.control = control_grid(sw.at("control"));
        if (auto v = optional_of<bool>(sw, "sweep.", "continuation")) {
            spec.continuation = *v;
        } else {
            spec.continuation = true;
            note_default("sweep.continuation = true");
        }
        if (auto v = optional_of<double>(sw, "sweep.", "xi")) {
            spec.xi = *v;
        } else {
            spec.xi = 1e-6;
            note_default("sweep.xi = 1e-6");
        }
        if (auto v = optional_of<uint64_t>(sw, "sweep.", "seed")) {
            spec.seed = *v;
        } else {
            spec.seed = 0;
            note_default("sweep.seed = 0");
        }
        if (auto v = optional_of<double>(sw, "sweep.", "threshold_fraction")) {
            spec.threshold_fraction = *v;
        } else {
            spec.threshold_fraction = 0.05;
            note_default("sweep.threshold_fraction = 0.05");
        }
        if (spec.xi < 0.0 || spec.xi > 1e-3)
            throw ValidationError("sweep.xi must lie in [0, 1e-3]");
        cfg.sweep = std::move(spec);
    }

    // output
    {
        json outp = doc.contains("output") ? doc.at("output") : json::object();
        reject_unknown(outp, "output.", {"record_every"});
        if (auto v = optional_of<int>(outp, "output.", "record_every")) {
            if (*v < 1) throw ValidationError("output.record_every must be >= 1");
            cfg.output.record_every = *v;
        } else {
            cfg.output.record_every = 100;
            note_default("output.record_every = 100");
        }
    }

    return cfg;
}

std::string resolved_config_json(const RunConfig& config) {
    json m;
    m["statistics"] = config.model.statistics == ParticleKind::Boson ? "boson" : "fermion";
    m["L"] = config.model.sites;
    m["t"] = config.model.hopping;
    m["U"] = config.model.interaction;
    if (config.model.sector) m["sector"] = *config.model.sector;
    if (config.model.boson_cap) m["cap"] = *config.model.boson_cap;
    if (config.model.pair_override) {
        json pl = json::array();
        for (const auto& [a, b] : *config.model.pair_override) pl.push_back({a, b});
        m["pairs"] = pl;
    }

    json dyn;
    dyn["beta"] = config.dynamics.beta;
    dyn["gamma_h"] = config.dynamics.gamma_h;
    dyn["gamma_d"] = config.dynamics.gamma_d;
    dyn["dt"] = config.dynamics.dt;
    dyn["t_max"] = config.dynamics.t_max;
    dyn["eig_floor"] = config.dynamics.eig_floor;
    dyn["ss_tol"] = config.dynamics.ss_tol;
    switch (config.initial.kind) {
        case InitialState::Kind::Thermal:
            dyn["initial_state"] = "thermal";
            break;
        case InitialState::Kind::Ground:
            dyn["initial_state"] = "ground";
            break;
        case InitialState::Kind::Fock:
            dyn["initial_state"] = "fock:" + std::to_string(config.initial.fock_index);
            break;
    }

    json doc;
    doc["model"] = m;
    doc["dynamics"] = dyn;
    if (config.sweep) {
        json sw;
        sw["control"] = config.sweep->control;
        sw["continuation"] = config.sweep->continuation;
        sw["xi"] = config.sweep->xi;
        sw["seed"] = config.sweep->seed;
        sw["threshold_fraction"] = config.sweep->threshold_fraction;
        doc["sweep"] = sw;
    }
    doc["output"]["record_every"] = config.output.record_every;
    return doc.dump(2);
}

}  // namespace disent
