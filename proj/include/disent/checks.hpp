#pragma once

#include <string>
#include <vector>

#include "disent/dynamics.hpp"
#include "disent/hubbard.hpp"

namespace disent {

/// One analytic-oracle comparison: residual against a closed form plus the
/// tolerance it must meet.
struct CheckItem {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

CheckItem make_check(std::string name, double residual, double tolerance);

// Granular residuals, reused by the CLI `check` command, the unit tests and
// the acceptance suite.

double fermi_anticommutator_residual(int modes);
double bose_projected_commutator_residual(int modes, int cap);
double bose_unprojected_boundary_residual(int cap);

double bose_built_vs_closed_matrix_residual(double t, double U);
double bose_spectrum_relative_residual(double t, double U);
double bose_u_diagonalization_residual(double t, double U);
double bose_number_commutation_residual(double t, double U);

double fermi_t0_spectrum_residual(double U);
double fermi_extremal_state_residual(double t, double U);
double fermi_number_commutation_residual(double t, double U);

double thermal_fixed_point_residual(ParticleKind kind, double t, double U, double beta);
double fock_state_qd_residual(ParticleKind kind, double t, double U);

double bose_parametrized_formula_residual(double t, double U);
double fermi_superposition_formula_residual(double t, double U);

/// The full battery with the required tolerances applied.
std::vector<CheckItem> run_closed_form_checks();

}  // namespace disent
