#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "disent/fock.hpp"

namespace disent {

/// Rates and integrator settings. dt and ss_tol of 0 select the defaults
/// dt = min(0.01/max(gamma_h, gamma_d, 1), 0.05/||H||_F) and
/// ss_tol = 1e-10 * max(gamma_h, 1) * ||rho||_F.
struct EvolutionParams {
    double beta = 100.0;
    double gamma_h = 1.0;   // thermalization rate
    double gamma_d = 0.0;   // disentanglement rate
    double dt = 0.0;
    double t_max = 50.0;
    double eig_floor = 1e-14;  // clamp for log(rho) eigenvalues
    double ss_tol = 0.0;

    void validate() const;
    double resolved_dt(double h_frobenius) const;
};

struct ObservableRecord {
    double time = 0.0;
    double trace_value = 0.0;
    double purity = 0.0;
    double energy = 0.0;
    double energy_over_u = 0.0;
    double total_number = 0.0;
    std::optional<double> n_up;
    std::optional<double> n_down;
    double q_d_expect = 0.0;                 // <Q^D> = sum of squared pair correlations
    std::optional<double> u_e;               // effective free energy (gamma_h > 0)
    std::vector<double> mode_occupations;    // <N_j>
    std::vector<double> pair_correlations;   // <N'N''> - <N'><N''> per configured pair
};

/// How ObservableRecord derived fields are labeled: |U| for energy/U and
/// whether modes alternate spin up/down.
struct ObservableLayout {
    double u_abs = 1.0;
    bool fermionic = false;
};

using PairList = std::vector<std::pair<int, int>>;

/// Q^(H) = beta*H + log(rho), log by clamped Hermitian eigendecomposition.
OperatorMatrix thermalization_operator(const ComplexMatrix& rho, const ComplexMatrix& h,
                                       double beta, double eig_floor = 1e-14);

/// Q^(D) = sum over pairs of Q_{j',j''} <Q_{j',j''}> with
/// Q = N'N'' - <N'><N''> I; all number operators must be diagonal.
OperatorMatrix disentanglement_operator(const ComplexMatrix& rho, const PairList& pairs,
                                        const std::vector<OperatorMatrix>& number_ops);

/// Theta = gamma_H Q^(H) + gamma_D Q^(D); gamma_H = 0 skips log(rho) entirely.
OperatorMatrix theta(const ComplexMatrix& rho, const ComplexMatrix& h,
                     const EvolutionParams& params, const PairList& pairs,
                     const std::vector<OperatorMatrix>& number_ops);

/// Full right-hand side i[rho,H] - Theta rho - rho Theta + 2<Theta> rho.
OperatorMatrix mme_rhs(const ComplexMatrix& rho, const ComplexMatrix& h,
                       const EvolutionParams& params, const PairList& pairs,
                       const std::vector<OperatorMatrix>& number_ops);

/// RHS with a fixed Theta and H = 0 (dissipator-only flow).
OperatorMatrix frozen_theta_rhs(const ComplexMatrix& rho, const ComplexMatrix& theta_op);

/// One classical RK4 step with Theta recomputed at every stage; the result is
/// re-Hermitized and trace-renormalized when |Tr rho - 1| > 1e-12.
DensityMatrix step_rk4(const DensityMatrix& rho, const ComplexMatrix& h,
                       const EvolutionParams& params, const PairList& pairs,
                       const std::vector<OperatorMatrix>& number_ops, double dt);

ObservableRecord observables(const ComplexMatrix& rho, const ComplexMatrix& h,
                             const EvolutionParams& params, const PairList& pairs,
                             const std::vector<OperatorMatrix>& number_ops,
                             const ObservableLayout& layout = {}, double time = 0.0);

enum class Termination { SteadyState, TMaxReached };

std::string to_string(Termination reason);

/// Conservation monitors accumulated along a trajectory.
struct MonitorSummary {
    double max_trace_drift = 0.0;     // cumulative pre-renormalization drift
    double max_herm_residual = 0.0;   // pre-enforcement step residual
    double min_purity = 1.0;
    double max_purity = 0.0;
    double max_block_leakage = 0.0;
    double min_energy = 0.0;
    double max_energy = 0.0;
    double min_eigenvalue_seen = 0.0;
};

struct EvolveOutcome {
    DensityMatrix final_state;
    std::vector<ObservableRecord> trajectory;
    Termination reason = Termination::TMaxReached;
    double final_residual = 0.0;
    double final_time = 0.0;
    long long steps = 0;
    MonitorSummary monitor;
};

/// Integrates until t_max or until ||RHS||_F < ss_tol. Records observables
/// every record_every steps (first and last always). block_ids, when given,
/// switch on the conserved-sector leakage monitor.
EvolveOutcome evolve(const DensityMatrix& rho0, const ComplexMatrix& h,
                     const EvolutionParams& params, const PairList& pairs,
                     const std::vector<OperatorMatrix>& number_ops, int record_every,
                     const ObservableLayout& layout = {},
                     const std::vector<int>* block_ids = nullptr);

}  // namespace disent
