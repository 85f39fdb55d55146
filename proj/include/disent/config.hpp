#pragma once

#include <optional>
#include <string>
#include <vector>

#include "disent/steady.hpp"

namespace disent {

struct OutputOptions {
    int record_every = 100;
};

/// Trajectory initial condition: the Gibbs state, the ground state of H, or
/// a single occupation basis state.
struct InitialState {
    enum class Kind { Thermal, Ground, Fock } kind = Kind::Thermal;
    int fock_index = 0;
};

/// Fully resolved run configuration. Defaults applied during parsing are
/// echoed in `applied_defaults` and land in the run metadata.
struct RunConfig {
    ModelSpec model;
    EvolutionParams dynamics;
    InitialState initial;
    std::optional<SweepSpec> sweep;
    OutputOptions output;
    std::vector<std::string> applied_defaults;
};

/// Parses and validates a JSON configuration document. Unknown keys are
/// rejected; schema violations throw ParseError naming the offending key,
/// physics-invalid combinations throw ValidationError.
RunConfig parse_config(const std::string& text);

/// Serializes the resolved configuration; parse_config on this round-trips.
std::string resolved_config_json(const RunConfig& config);

}  // namespace disent
