#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "disent/fock.hpp"

namespace disent {

/// Hubbard ring parameters. Sites are coupled periodically; for L = 2 the
/// periodic sum visits the single physical bond twice, so the effective
/// hopping there is 2t.
struct ModelSpec {
    ParticleKind statistics = ParticleKind::Boson;
    int sites = 2;
    double hopping = 0.0;      // t
    double interaction = 1.0;  // U
    std::optional<int> sector;
    std::optional<int> boson_cap;  // defaults to the sector particle number
    std::optional<std::vector<std::pair<int, int>>> pair_override;

    int modes() const { return statistics == ParticleKind::Fermion ? 2 * sites : sites; }
};

/// Mode layout for fermions: m = 2*site + spin, spin 0 = up, 1 = down.
inline int fermion_mode(int site, int spin) { return 2 * site + spin; }

/// Basis the dynamics runs in: bosons use the fixed-N sector, fermions the
/// full 4^L space.
OccupationBasis model_basis(const ModelSpec& spec);

OperatorMatrix build_bose_hubbard(const ModelSpec& spec, const OccupationBasis& basis);
OperatorMatrix build_fermi_hubbard(const ModelSpec& spec, const OccupationBasis& basis);
OperatorMatrix build_hamiltonian(const ModelSpec& spec, const OccupationBasis& basis);

/// Mode-index pairs (j', j'') whose number products enter the interaction:
/// on-site (l,l) for bosons, (l-up, l-down) for fermions, or the override.
std::vector<std::pair<int, int>> interaction_pairs(const ModelSpec& spec);

/// Closed forms for the two-site Bose-Hubbard N=2 sector: tau = 2^{3/2} t/U,
/// mixing angle tan(alpha) = -2^{3/2} tau, energies E1 <= E3 with E2 = U, and
/// the orthogonal matrix u whose columns diagonalize the 3x3 Hamiltonian.
struct TwoSiteBoseReference {
    double tau = 0.0;
    double alpha = 0.0;
    std::array<double, 3> energies{};
    ComplexMatrix u;
};

TwoSiteBoseReference two_site_bose_reference(double t, double U);

/// The 3x3 matrix U*[[1,-tau,0],[-tau,0,-tau],[0,-tau,1]] in the ordered
/// basis {|n2=0,n1=2>, |1,1>, |2,0>}.
ComplexMatrix two_site_bose_closed_matrix(double t, double U);

/// Extremal eigenvectors of the two-site Fermi-Hubbard Hamiltonian on the
/// full 16-dim space, with alpha = arctan(-8t/U)/2. The floor has energy
/// -U/(2 cos 2a), the ceiling +U/(2 cos 2a) (roles swap for U < 0).
struct TwoSiteFermiReference {
    double alpha = 0.0;
    std::vector<cplx> floor_state;    // 16 amplitudes
    std::vector<cplx> ceiling_state;  // 16 amplitudes
    double floor_energy = 0.0;
    double ceiling_energy = 0.0;
};

TwoSiteFermiReference two_site_fermi_reference(double t, double U);

}  // namespace disent
