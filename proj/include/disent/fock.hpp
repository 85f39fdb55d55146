#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "disent/linalg.hpp"

namespace disent {

using OperatorMatrix = ComplexMatrix;

enum class ParticleKind { Boson, Fermion };

/// Exchange statistics plus the bosonic occupancy cap. Fermions are always
/// capped at one particle per mode.
struct Statistics {
    ParticleKind kind = ParticleKind::Boson;
    int boson_cap = 1;

    static Statistics boson(int cap);
    static Statistics fermion();

    int cap() const { return kind == ParticleKind::Fermion ? 1 : boson_cap; }
};

/// Enumerated occupation-number basis |n_1 ... n_M> of a truncated Fock space,
/// optionally restricted to a total-particle-number sector. Ordering is
/// lexicographic in the reversed tuple (n_M, ..., n_1), so state labels read
/// like little-endian integers and the fermionic index is the plain bitmask.
class OccupationBasis {
public:
    static OccupationBasis enumerate(int modes, Statistics stats,
                                     std::optional<int> sector = std::nullopt);

    int modes() const { return modes_; }
    const Statistics& statistics() const { return stats_; }
    int cap() const { return stats_.cap(); }
    std::optional<int> sector() const { return sector_; }
    int dim() const { return static_cast<int>(states_.size()); }

    const std::vector<int>& state(int index) const { return states_[index]; }
    std::optional<int> index_of(const std::vector<int>& occ) const;

    /// Printed as |n_M ... n_1>.
    std::string label(int index) const;

    /// Total particle number of a state.
    int total_number(int index) const;

    /// Block key for conserved-number structure: total N for bosons,
    /// (N_up, N_down) packed for fermions (modes alternate up/down).
    int block_key(int index) const;

private:
    int modes_ = 0;
    Statistics stats_;
    std::optional<int> sector_;
    std::vector<std::vector<int>> states_;
    std::map<std::vector<int>, int> index_;
};

OperatorMatrix creation_matrix(const OccupationBasis& basis, int mode);
OperatorMatrix annihilation_matrix(const OccupationBasis& basis, int mode);
OperatorMatrix number_matrix(const OccupationBasis& basis, int mode);

/// Rectangular creation-operator block mapping the `from` sector basis into
/// `to` (total number raised by one): entry (i,j) = <to_i| a_mode† |from_j>.
struct SectorBlock {
    int rows = 0;
    int cols = 0;
    std::vector<cplx> a;
    cplx& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const cplx& operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

SectorBlock creation_block(const OccupationBasis& from, const OccupationBasis& to, int mode);

/// Transformed creation operators b_j† = sum_i coeffs(i,j) a_i† for a
/// single-particle unitary. Throws ValidationError if coeffs is not unitary.
std::vector<OperatorMatrix> apply_single_particle_unitary(const OccupationBasis& basis,
                                                          const ComplexMatrix& coeffs);

/// Max-entry residuals of the pairwise (anti)commutation identities.
/// For bosons the identities are checked after projecting out states with
/// any n_i = cap; `boundary_residual` reports the unprojected mismatch.
struct AlgebraReport {
    double aa_residual = 0.0;        // [a_i, a_j]_± = 0
    double adad_residual = 0.0;      // [a_i†, a_j†]_± = 0
    double aad_residual = 0.0;       // [a_i, a_j†]_± = delta_ij
    double boundary_residual = 0.0;  // bosons only: unprojected cap-boundary mismatch
    double max_residual() const;
};

AlgebraReport check_algebra(const OccupationBasis& basis);

// Density-matrix validation (Hermitian, unit trace, PSD up to tolerances).
struct DensityMatrix {
    ComplexMatrix matrix;
};

struct DensityCheck {
    double hermiticity = 0.0;
    double trace_error = 0.0;
    double min_eig = 0.0;
    bool ok() const;
};

DensityCheck validate_density(const ComplexMatrix& rho);

}  // namespace disent
