#include "disent/hubbard.hpp"

#include <cmath>

#include "disent/errors.hpp"

namespace disent {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

void validate_spec(const ModelSpec& spec) {
    if (spec.sites < 2) throw ParameterError("sites must be >= 2");
    if (!std::isfinite(spec.hopping) || !std::isfinite(spec.interaction))
        throw ParameterError("t and U must be finite");
}

// Applies a_i† a_j to |occ> in place; returns the amplitude (0 if annihilated).
double hop_amplitude(const OccupationBasis& basis, std::vector<int>& occ, int i, int j) {
    const bool fermi = basis.statistics().kind == ParticleKind::Fermion;
    if (occ[j] == 0) return 0.0;
    double amp = 1.0;
    if (fermi) {
        int parity = 0;
        for (int k = 0; k < j; ++k) parity += occ[k];
        amp *= (parity % 2 == 0) ? 1.0 : -1.0;
        occ[j] = 0;
    } else {
        amp *= std::sqrt(static_cast<double>(occ[j]));
        occ[j] -= 1;
    }
    if (occ[i] >= basis.cap()) return 0.0;
    if (fermi) {
        int parity = 0;
        for (int k = 0; k < i; ++k) parity += occ[k];
        amp *= (parity % 2 == 0) ? 1.0 : -1.0;
        occ[i] = 1;
    } else {
        amp *= std::sqrt(static_cast<double>(occ[i] + 1));
        occ[i] += 1;
    }
    return amp;
}

void add_hopping_term(const OccupationBasis& basis, OperatorMatrix& h, double coeff, int i, int j) {
    for (int col = 0; col < basis.dim(); ++col) {
        std::vector<int> occ = basis.state(col);
        const double amp = hop_amplitude(basis, occ, i, j);
        if (amp == 0.0) continue;
        const auto row = basis.index_of(occ);
        if (row) h(*row, col) += coeff * amp;
    }
}

}  // namespace

OccupationBasis model_basis(const ModelSpec& spec) {
    validate_spec(spec);
    if (spec.statistics == ParticleKind::Fermion)
        return OccupationBasis::enumerate(2 * spec.sites, Statistics::fermion(), spec.sector);
    if (!spec.sector && !spec.boson_cap)
        throw ParameterError("bosonic model needs a particle-number sector or an explicit cap");
    const int cap = spec.boson_cap ? *spec.boson_cap : *spec.sector;
    return OccupationBasis::enumerate(spec.sites, Statistics::boson(cap), spec.sector);
}

OperatorMatrix build_bose_hubbard(const ModelSpec& spec, const OccupationBasis& basis) {
    validate_spec(spec);
    if (spec.statistics != ParticleKind::Boson)
        throw ParameterError("build_bose_hubbard requires bosonic statistics");
    if (basis.modes() != spec.sites) throw ParameterError("basis does not match model sites");

    const int L = spec.sites;
    OperatorMatrix h(basis.dim());

    // Ring hopping: the l = L-1 bond wraps to site 0; for L = 2 the same bond
    // enters twice, as the periodic sum requires.
    for (int l = 0; l < L; ++l) {
        const int lp = (l + 1) % L;
        add_hopping_term(basis, h, -spec.hopping, l, lp);
        add_hopping_term(basis, h, -spec.hopping, lp, l);
    }
    for (int s = 0; s < basis.dim(); ++s) {
        double diag = 0.0;
        for (int l = 0; l < L; ++l) {
            const double n = basis.state(s)[l];
            diag += 0.5 * spec.interaction * n * (n - 1.0);
        }
        h(s, s) += diag;
    }
    return h;
}

OperatorMatrix build_fermi_hubbard(const ModelSpec& spec, const OccupationBasis& basis) {
    validate_spec(spec);
    if (spec.statistics != ParticleKind::Fermion)
        throw ParameterError("build_fermi_hubbard requires fermionic statistics");
    if (basis.modes() != 2 * spec.sites) throw ParameterError("basis does not match model modes");

    const int L = spec.sites;
    OperatorMatrix h(basis.dim());

    for (int spin = 0; spin < 2; ++spin) {
        for (int l = 0; l < L; ++l) {
            const int lp = (l + 1) % L;
            add_hopping_term(basis, h, -spec.hopping, fermion_mode(l, spin), fermion_mode(lp, spin));
            add_hopping_term(basis, h, -spec.hopping, fermion_mode(lp, spin), fermion_mode(l, spin));
        }
    }
    for (int s = 0; s < basis.dim(); ++s) {
        double diag = 0.0;
        for (int l = 0; l < L; ++l) {
            const double nu = basis.state(s)[fermion_mode(l, 0)];
            const double nd = basis.state(s)[fermion_mode(l, 1)];
            diag += spec.interaction * (nu - 0.5) * (nd - 0.5);
        }
        h(s, s) += diag;
    }
    return h;
}

OperatorMatrix build_hamiltonian(const ModelSpec& spec, const OccupationBasis& basis) {
    return spec.statistics == ParticleKind::Boson ? build_bose_hubbard(spec, basis)
                                                  : build_fermi_hubbard(spec, basis);
}

std::vector<std::pair<int, int>> interaction_pairs(const ModelSpec& spec) {
    validate_spec(spec);
    if (spec.pair_override) return *spec.pair_override;
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(spec.sites);
    for (int l = 0; l < spec.sites; ++l) {
        if (spec.statistics == ParticleKind::Boson)
            pairs.emplace_back(l, l);
        else
            pairs.emplace_back(fermion_mode(l, 0), fermion_mode(l, 1));
    }
    return pairs;
}

TwoSiteBoseReference two_site_bose_reference(double t, double U) {
    if (U == 0.0) throw ParameterError("two-site reference requires U != 0");
    TwoSiteBoseReference ref;
    ref.tau = 2.0 * kSqrt2 * t / U;
    ref.alpha = std::atan(-2.0 * kSqrt2 * ref.tau);
    const double root = std::sqrt(1.0 + std::pow(8.0 * t / U, 2));
    ref.energies = {0.5 * U * (1.0 - root), U, 0.5 * U * (1.0 + root)};

    const double sh = std::sin(0.5 * ref.alpha);
    const double ch = std::cos(0.5 * ref.alpha);
    ref.u = ComplexMatrix(3);
    ref.u(0, 0) = sh / kSqrt2;
    ref.u(0, 1) = 1.0 / kSqrt2;
    ref.u(0, 2) = ch / kSqrt2;
    ref.u(1, 0) = -ch;
    ref.u(1, 1) = 0.0;
    ref.u(1, 2) = sh;
    ref.u(2, 0) = sh / kSqrt2;
    ref.u(2, 1) = -1.0 / kSqrt2;
    ref.u(2, 2) = ch / kSqrt2;
    return ref;
}

ComplexMatrix two_site_bose_closed_matrix(double t, double U) {
    if (U == 0.0) throw ParameterError("closed-form matrix requires U != 0");
    const double tau = 2.0 * kSqrt2 * t / U;
    ComplexMatrix h(3);
    h(0, 0) = U;
    h(2, 2) = U;
    h(0, 1) = h(1, 0) = h(1, 2) = h(2, 1) = -tau * U;
    return h;
}

TwoSiteFermiReference two_site_fermi_reference(double t, double U) {
    if (U == 0.0) throw ParameterError("two-site reference requires U != 0");
    TwoSiteFermiReference ref;
    ref.alpha = 0.5 * std::atan(-8.0 * t / U);

    // Basis indices are occupation bitmasks over modes (1u,1d,2u,2d):
    // |0011> = 3 and |1100> = 12 are the doubly-occupied sites, |0110> = 6 and
    // |1001> = 9 the opposite-spin singles. In this sign convention the floor
    // couples through (|0110> - |1001>).
    const double s = std::sin(ref.alpha);
    const double c = std::cos(ref.alpha);
    std::vector<cplx> f(16, cplx{}), g(16, cplx{});
    f[3] = s / kSqrt2;
    f[12] = s / kSqrt2;
    f[6] = c / kSqrt2;
    f[9] = -c / kSqrt2;
    g[3] = c / kSqrt2;
    g[12] = c / kSqrt2;
    g[6] = -s / kSqrt2;
    g[9] = s / kSqrt2;

    const double e = 0.5 * U / std::cos(2.0 * ref.alpha);
    ref.floor_state = std::move(f);
    ref.ceiling_state = std::move(g);
    ref.floor_energy = -e;
    ref.ceiling_energy = e;
    if (U < 0.0) {
        std::swap(ref.floor_state, ref.ceiling_state);
        std::swap(ref.floor_energy, ref.ceiling_energy);
    }
    return ref;
}

}  // namespace disent
