#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "disent/dynamics.hpp"
#include "disent/hubbard.hpp"

namespace disent {

/// Gibbs state e^{-beta H}/Tr e^{-beta H} via eigendecomposition with
/// exponent shifting; beta = 0 gives the maximally mixed state.
DensityMatrix thermal_state(const ComplexMatrix& h, double beta);

/// Random Hermitian trace-free perturbation of Frobenius norm xi confined to
/// the conserved-number blocks, followed by a PSD repair (negative
/// eigenvalues clamped, trace renormalized).
DensityMatrix perturb_density(const DensityMatrix& rho, double xi, uint64_t seed,
                              const std::vector<int>& block_ids);

struct SteadyResult {
    DensityMatrix state;
    ObservableRecord record;
    double residual = 0.0;
    Termination reason = Termination::TMaxReached;
};

/// Runs evolve to the steady-state criterion; non-convergence at t_max is a
/// reported status, not an error.
SteadyResult find_steady_state(const DensityMatrix& rho0, const ComplexMatrix& h,
                               const EvolutionParams& params, const PairList& pairs,
                               const std::vector<OperatorMatrix>& number_ops,
                               const ObservableLayout& layout = {},
                               const std::vector<int>* block_ids = nullptr);

/// Control-parameter sweep over gamma_D/(beta |U| gamma_H).
struct SweepSpec {
    ModelSpec model;
    EvolutionParams params;        // per-point template; gamma_d is set from the control value
    std::vector<double> control;   // strictly monotone grid
    bool continuation = true;
    double xi = 1e-6;              // perturbation scale, in [0, 1e-3]
    uint64_t seed = 0;
    double threshold_fraction = 0.05;
};

struct SweepPoint {
    double control = 0.0;
    ObservableRecord record;
    Termination reason = Termination::TMaxReached;
    double residual = 0.0;
    bool converged = false;
    double ground_occupation = 0.0;       // weight on the floor eigenvector
    double off_extremal_occupation = 0.0; // weight outside floor and ceiling
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::optional<double> critical_estimate;
};

/// Executes the sweep. With continuation each point starts from the previous
/// steady state plus a seeded perturbation; otherwise every point starts from
/// the perturbed thermal state and the grid runs in parallel when OpenMP is
/// available. Point order in the result always follows the grid.
SweepResult sweep(const SweepSpec& spec, const ComplexMatrix& h, const PairList& pairs,
                  const std::vector<OperatorMatrix>& number_ops);

/// First control value whose steady energy departs from ground_energy by more
/// than threshold_fraction * u_abs, linearly interpolated between grid points.
std::optional<double> detect_transition(const SweepResult& result, double ground_energy,
                                        double u_abs, double threshold_fraction = 0.05);

/// <U_e> from a record; full mode uses the stored value (computed with the
/// clamped log-spectrum), low-temperature mode takes <U_H> = <H>.
double effective_free_energy(const ObservableRecord& record, const EvolutionParams& params,
                             bool low_temperature = false);

}  // namespace disent
