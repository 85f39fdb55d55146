#include "disent/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "disent/errors.hpp"

namespace disent {

Statistics Statistics::boson(int cap) {
    if (cap < 1) throw ParameterError("boson cap must be >= 1");
    return Statistics{ParticleKind::Boson, cap};
}

Statistics Statistics::fermion() {
    return Statistics{ParticleKind::Fermion, 1};
}

OccupationBasis OccupationBasis::enumerate(int modes, Statistics stats, std::optional<int> sector) {
    if (modes < 1) throw ParameterError("modes must be >= 1");
    const int cap = stats.cap();
    if (cap < 1) throw ParameterError("cap must be >= 1");
    if (sector && (*sector < 0 || *sector > modes * cap))
        throw ParameterError("sector out of range [0, modes*cap]");

    OccupationBasis b;
    b.modes_ = modes;
    b.stats_ = stats;
    b.sector_ = sector;

    // Odometer with n_M most significant: yields ascending lexicographic order
    // in (n_M, ..., n_1).
    std::vector<int> occ(modes, 0);
    while (true) {
        if (!sector || std::accumulate(occ.begin(), occ.end(), 0) == *sector) {
            b.index_.emplace(occ, static_cast<int>(b.states_.size()));
            b.states_.push_back(occ);
        }
        int m = 0;
        while (m < modes && occ[m] == cap) {
            occ[m] = 0;
            ++m;
        }
        if (m == modes) break;
        ++occ[m];
    }
    return b;
}

std::optional<int> OccupationBasis::index_of(const std::vector<int>& occ) const {
    auto it = index_.find(occ);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::string OccupationBasis::label(int index) const {
    const auto& occ = states_[index];
    std::string s = "|";
    for (int m = modes_ - 1; m >= 0; --m) {
        if (cap() > 9) {
            s += std::to_string(occ[m]);
            if (m > 0) s += ",";
        } else {
            s += std::to_string(occ[m]);
        }
    }
    s += ">";
    return s;
}

int OccupationBasis::total_number(int index) const {
    const auto& occ = states_[index];
    return std::accumulate(occ.begin(), occ.end(), 0);
}

int OccupationBasis::block_key(int index) const {
    const auto& occ = states_[index];
    if (stats_.kind == ParticleKind::Fermion && modes_ % 2 == 0) {
        int up = 0, down = 0;
        for (int m = 0; m < modes_; ++m) (m % 2 == 0 ? up : down) += occ[m];
        return up * (modes_ + 1) + down;
    }
    return std::accumulate(occ.begin(), occ.end(), 0);
}

namespace {

int fermion_sign(const std::vector<int>& occ, int mode) {
    int parity = 0;
    for (int k = 0; k < mode; ++k) parity += occ[k];
    return (parity % 2 == 0) ? 1 : -1;
}

void require_mode(const OccupationBasis& basis, int mode) {
    if (mode < 0 || mode >= basis.modes()) throw ParameterError("mode index out of range");
}

// Amplitude <occ+e_mode|a_mode†|occ>, zero at the cap.
double creation_amp(const OccupationBasis& basis, const std::vector<int>& occ, int mode) {
    const int n = occ[mode];
    if (n >= basis.cap()) return 0.0;  // truncation / Pauli
    if (basis.statistics().kind == ParticleKind::Fermion) return fermion_sign(occ, mode);
    return std::sqrt(static_cast<double>(n + 1));
}

}  // namespace

OperatorMatrix creation_matrix(const OccupationBasis& basis, int mode) {
    require_mode(basis, mode);
    if (basis.sector())
        throw UsageError("creation operator changes particle number; use creation_block on sector bases");
    OperatorMatrix m(basis.dim());
    for (int j = 0; j < basis.dim(); ++j) {
        std::vector<int> occ = basis.state(j);
        const double amp = creation_amp(basis, occ, mode);
        if (amp == 0.0) continue;
        occ[mode] += 1;
        const auto i = basis.index_of(occ);
        if (i) m(*i, j) = amp;
    }
    return m;
}

OperatorMatrix annihilation_matrix(const OccupationBasis& basis, int mode) {
    return adjoint(creation_matrix(basis, mode));
}

OperatorMatrix number_matrix(const OccupationBasis& basis, int mode) {
    require_mode(basis, mode);
    OperatorMatrix m(basis.dim());
    for (int j = 0; j < basis.dim(); ++j) m(j, j) = static_cast<double>(basis.state(j)[mode]);
    return m;
}

SectorBlock creation_block(const OccupationBasis& from, const OccupationBasis& to, int mode) {
    require_mode(from, mode);
    SectorBlock blk;
    blk.rows = to.dim();
    blk.cols = from.dim();
    blk.a.assign(static_cast<size_t>(blk.rows) * blk.cols, cplx{});
    for (int j = 0; j < from.dim(); ++j) {
        std::vector<int> occ = from.state(j);
        const double amp = creation_amp(from, occ, mode);
        if (amp == 0.0) continue;
        occ[mode] += 1;
        const auto i = to.index_of(occ);
        if (i) blk(*i, j) = amp;
    }
    return blk;
}

std::vector<OperatorMatrix> apply_single_particle_unitary(const OccupationBasis& basis,
                                                          const ComplexMatrix& coeffs) {
    const int m = basis.modes();
    if (coeffs.dim() != m) throw ParameterError("coefficient matrix must be modes x modes");
    const ComplexMatrix gram = matmul(adjoint(coeffs), coeffs);
    if (max_abs_diff(gram, ComplexMatrix::identity(m)) > 1e-12)
        throw ValidationError("single-particle coefficient matrix is not unitary");

    std::vector<OperatorMatrix> creators;
    creators.reserve(m);
    for (int i = 0; i < m; ++i) creators.push_back(creation_matrix(basis, i));

    std::vector<OperatorMatrix> out;
    out.reserve(m);
    for (int j = 0; j < m; ++j) {
        OperatorMatrix bj(basis.dim());
        for (int i = 0; i < m; ++i) axpy_inplace(bj, coeffs(i, j), creators[i]);
        out.push_back(std::move(bj));
    }
    return out;
}

double AlgebraReport::max_residual() const {
    return std::max({aa_residual, adad_residual, aad_residual});
}

AlgebraReport check_algebra(const OccupationBasis& basis) {
    if (basis.sector()) throw UsageError("check_algebra requires an unrestricted basis");
    const int m = basis.modes();
    const int d = basis.dim();
    const bool fermi = basis.statistics().kind == ParticleKind::Fermion;
    const int sign = fermi ? +1 : -1;  // [A,B]_+ for fermions, [A,B]_- for bosons

    std::vector<OperatorMatrix> a(m), ad(m);
    for (int i = 0; i < m; ++i) {
        ad[i] = creation_matrix(basis, i);
        a[i] = adjoint(ad[i]);
    }

    // Bosons: project out states touching the cap, where truncation breaks
    // the algebra by construction.
    std::vector<bool> keep(d, true);
    if (!fermi) {
        for (int s = 0; s < d; ++s)
            for (int v : basis.state(s))
                if (v == basis.cap()) keep[s] = false;
    }
    auto projected_max = [&](const ComplexMatrix& x) {
        double r = 0.0;
        for (int i = 0; i < d; ++i) {
            if (!keep[i]) continue;
            for (int j = 0; j < d; ++j) {
                if (!keep[j]) continue;
                r = std::max(r, std::abs(x(i, j)));
            }
        }
        return r;
    };

    auto bracket = [&](const ComplexMatrix& x, const ComplexMatrix& y) {
        return sign > 0 ? anticommutator(x, y) : commutator(x, y);
    };

    AlgebraReport rep;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            rep.aa_residual = std::max(rep.aa_residual, projected_max(bracket(a[i], a[j])));
            rep.adad_residual = std::max(rep.adad_residual, projected_max(bracket(ad[i], ad[j])));
            ComplexMatrix c = bracket(a[i], ad[j]);
            if (i == j) axpy_inplace(c, -1.0, ComplexMatrix::identity(d));
            rep.aad_residual = std::max(rep.aad_residual, projected_max(c));
            if (!fermi) rep.boundary_residual = std::max(rep.boundary_residual, max_abs(c));
        }
    }
    return rep;
}

bool DensityCheck::ok() const {
    return hermiticity <= 1e-12 && trace_error <= 1e-9 && min_eig >= -1e-9;
}

DensityCheck validate_density(const ComplexMatrix& rho) {
    DensityCheck c;
    c.hermiticity = hermiticity_residual(rho);
    c.trace_error = std::abs(trace(rho) - 1.0);
    c.min_eig = min_eigenvalue(rho);
    return c;
}

}  // namespace disent
