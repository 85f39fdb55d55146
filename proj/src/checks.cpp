#include "disent/checks.hpp"

#include <algorithm>
#include <cmath>

#include "disent/io.hpp"
#include "disent/steady.hpp"

namespace disent {

namespace {

constexpr double kPi = 3.141592653589793;

ModelSpec bose_fig1_spec(double t, double U) {
    ModelSpec spec;
    spec.statistics = ParticleKind::Boson;
    spec.sites = 2;
    spec.hopping = t;
    spec.interaction = U;
    spec.sector = 2;
    return spec;
}

ModelSpec fermi_fig2_spec(double t, double U) {
    ModelSpec spec;
    spec.statistics = ParticleKind::Fermion;
    spec.sites = 2;
    spec.hopping = t;
    spec.interaction = U;
    return spec;
}

std::vector<OperatorMatrix> number_ops_of(const OccupationBasis& basis) {
    std::vector<OperatorMatrix> ops;
    ops.reserve(basis.modes());
    for (int m = 0; m < basis.modes(); ++m) ops.push_back(number_matrix(basis, m));
    return ops;
}

double pair_correlation(const ComplexMatrix& rho, const OperatorMatrix& na,
                        const OperatorMatrix& nb) {
    double mean_a = 0.0, mean_b = 0.0, mean_ab = 0.0;
    for (int k = 0; k < rho.dim(); ++k) {
        const double p = rho(k, k).real();
        mean_a += na(k, k).real() * p;
        mean_b += nb(k, k).real() * p;
        mean_ab += na(k, k).real() * nb(k, k).real() * p;
    }
    return mean_ab - mean_a * mean_b;
}

ComplexMatrix outer(const std::vector<cplx>& psi) {
    const int d = static_cast<int>(psi.size());
    ComplexMatrix rho(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) rho(i, j) = psi[i] * std::conj(psi[j]);
    return rho;
}

}  // namespace

CheckItem make_check(std::string name, double residual, double tolerance) {
    CheckItem item;
    item.name = std::move(name);
    item.residual = residual;
    item.tolerance = tolerance;
    item.pass = residual <= tolerance;
    return item;
}

double fermi_anticommutator_residual(int modes) {
    const auto basis = OccupationBasis::enumerate(modes, Statistics::fermion());
    return check_algebra(basis).max_residual();
}

double bose_projected_commutator_residual(int modes, int cap) {
    const auto basis = OccupationBasis::enumerate(modes, Statistics::boson(cap));
    return check_algebra(basis).max_residual();
}

double bose_unprojected_boundary_residual(int cap) {
    const auto basis = OccupationBasis::enumerate(1, Statistics::boson(cap));
    return check_algebra(basis).boundary_residual;
}

double bose_built_vs_closed_matrix_residual(double t, double U) {
    const ModelSpec spec = bose_fig1_spec(t, U);
    const auto basis = model_basis(spec);
    return max_abs_diff(build_bose_hubbard(spec, basis), two_site_bose_closed_matrix(t, U));
}

double bose_spectrum_relative_residual(double t, double U) {
    const ModelSpec spec = bose_fig1_spec(t, U);
    const auto basis = model_basis(spec);
    const EighResult es = eigh(build_bose_hubbard(spec, basis));
    auto expected = two_site_bose_reference(t, U).energies;
    std::sort(expected.begin(), expected.end());
    double res = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double scale = std::max(std::abs(expected[i]), std::abs(U));
        res = std::max(res, std::abs(es.values[i] - expected[i]) / scale);
    }
    return res;
}

double bose_u_diagonalization_residual(double t, double U) {
    const TwoSiteBoseReference ref = two_site_bose_reference(t, U);
    const ComplexMatrix h = two_site_bose_closed_matrix(t, U);
    // u must be orthogonal and u† H u diagonal with the closed-form energies.
    const double ortho = max_abs_diff(matmul(adjoint(ref.u), ref.u), ComplexMatrix::identity(3));
    ComplexMatrix d = matmul(adjoint(ref.u), matmul(h, ref.u));
    double res = ortho * std::abs(U);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double want = (i == j) ? ref.energies[i] : 0.0;
            res = std::max(res, std::abs(d(i, j) - want));
        }
    return res / std::max(frobenius_norm(h), 1.0);
}

double bose_number_commutation_residual(double t, double U) {
    const ModelSpec spec = bose_fig1_spec(t, U);
    const auto basis = model_basis(spec);
    const ComplexMatrix h = build_bose_hubbard(spec, basis);
    ComplexMatrix n_total(basis.dim());
    for (int m = 0; m < basis.modes(); ++m) axpy_inplace(n_total, 1.0, number_matrix(basis, m));
    return max_abs(commutator(h, n_total));
}

double fermi_t0_spectrum_residual(double U) {
    const ModelSpec spec = fermi_fig2_spec(0.0, U);
    const auto basis = model_basis(spec);
    const EighResult es = eigh(build_fermi_hubbard(spec, basis));
    std::vector<double> expected;
    for (int i = 0; i < 4; ++i) expected.push_back(-0.5 * std::abs(U));
    for (int i = 0; i < 8; ++i) expected.push_back(0.0);
    for (int i = 0; i < 4; ++i) expected.push_back(0.5 * std::abs(U));
    double res = 0.0;
    for (int i = 0; i < 16; ++i) res = std::max(res, std::abs(es.values[i] - expected[i]));
    return res;
}

double fermi_extremal_state_residual(double t, double U) {
    const ModelSpec spec = fermi_fig2_spec(t, U);
    const auto basis = model_basis(spec);
    const ComplexMatrix h = build_fermi_hubbard(spec, basis);
    const TwoSiteFermiReference ref = two_site_fermi_reference(t, U);
    const EighResult es = eigh(h);

    double res = std::abs(ref.floor_energy - es.values.front());
    res = std::max(res, std::abs(ref.ceiling_energy - es.values.back()));
    // H|f> = E_f |f> residual, same for the ceiling.
    for (const auto& [state, energy] :
         {std::pair{&ref.floor_state, ref.floor_energy},
          std::pair{&ref.ceiling_state, ref.ceiling_energy}}) {
        for (int i = 0; i < 16; ++i) {
            cplx acc{};
            for (int j = 0; j < 16; ++j) acc += h(i, j) * (*state)[j];
            res = std::max(res, std::abs(acc - energy * (*state)[i]));
        }
    }
    return res;
}

double fermi_number_commutation_residual(double t, double U) {
    const ModelSpec spec = fermi_fig2_spec(t, U);
    const auto basis = model_basis(spec);
    const ComplexMatrix h = build_fermi_hubbard(spec, basis);
    ComplexMatrix n_up(basis.dim()), n_down(basis.dim());
    for (int l = 0; l < spec.sites; ++l) {
        axpy_inplace(n_up, 1.0, number_matrix(basis, fermion_mode(l, 0)));
        axpy_inplace(n_down, 1.0, number_matrix(basis, fermion_mode(l, 1)));
    }
    return std::max(max_abs(commutator(h, n_up)), max_abs(commutator(h, n_down)));
}

double thermal_fixed_point_residual(ParticleKind kind, double t, double U, double beta) {
    const ModelSpec spec =
        kind == ParticleKind::Boson ? bose_fig1_spec(t, U) : fermi_fig2_spec(t, U);
    const auto basis = model_basis(spec);
    const ComplexMatrix h = build_hamiltonian(spec, basis);
    const DensityMatrix rho0 = thermal_state(h, beta);
    EvolutionParams params;
    params.beta = beta;
    params.gamma_h = 1.0;
    params.gamma_d = 0.0;
    return frobenius_norm(
        mme_rhs(rho0.matrix, h, params, interaction_pairs(spec), number_ops_of(basis)));
}

double fock_state_qd_residual(ParticleKind kind, double t, double U) {
    const ModelSpec spec =
        kind == ParticleKind::Boson ? bose_fig1_spec(t, U) : fermi_fig2_spec(t, U);
    const auto basis = model_basis(spec);
    const auto pairs = interaction_pairs(spec);
    const auto nops = number_ops_of(basis);
    double res = 0.0;
    for (int s = 0; s < basis.dim(); ++s) {
        ComplexMatrix rho(basis.dim());
        rho(s, s) = 1.0;
        res = std::max(res, max_abs(disentanglement_operator(rho, pairs, nops)));
    }
    return res;
}

double bose_parametrized_formula_residual(double t, double U) {
    const ModelSpec spec = bose_fig1_spec(t, U);
    const auto basis = model_basis(spec);
    const ComplexMatrix h = build_bose_hubbard(spec, basis);
    const OperatorMatrix n1 = number_matrix(basis, 0);
    const OperatorMatrix n2 = number_matrix(basis, 1);
    const double tau = 2.0 * std::sqrt(2.0) * t / U;

    double res = 0.0;
    const std::vector<double> xs = {0.0, kPi / 8, -kPi / 8, kPi / 4, 0.37};
    const std::vector<double> phis = {0.0, kPi / 8, kPi / 4, 3 * kPi / 8, kPi / 2};
    const std::vector<double> phases = {0.0, 0.9, 2.3};
    for (double x : xs)
        for (double phi : phis)
            for (double th : phases) {
                const std::vector<cplx> psi = {
                    std::cos(x + kPi / 4) * std::cos(phi) * std::exp(cplx(0, th)),
                    std::sin(phi) * std::exp(cplx(0, 0.4 * th)),
                    std::sin(x + kPi / 4) * std::cos(phi) * std::exp(cplx(0, -th))};
                const ComplexMatrix rho = outer(psi);
                const cplx a = 2.0 * rho(0, 1);
                const cplx b = 2.0 * rho(1, 2);

                const double energy = trace_product(h, rho).real();
                const double want_e = U * (std::cos(phi) * std::cos(phi) - tau * (a + b).real());
                res = std::max(res, std::abs(energy - want_e));

                const double c2 = std::cos(phi) * std::cos(phi);
                const double s2x = std::sin(2 * x);
                const double want_q = (1.0 - s2x * s2x * c2) * c2;
                res = std::max(res, std::abs(pair_correlation(rho, n1, n1) - want_q));
                res = std::max(res, std::abs(pair_correlation(rho, n2, n2) - want_q));
                res = std::max(res, std::abs(pair_correlation(rho, n1, n2) + want_q));
            }
    return res;
}

double fermi_superposition_formula_residual(double t, double U) {
    const ModelSpec spec = fermi_fig2_spec(t, U);
    const auto basis = model_basis(spec);
    const ComplexMatrix h = build_fermi_hubbard(spec, basis);
    const TwoSiteFermiReference ref = two_site_fermi_reference(t, U);
    const OperatorMatrix n1u = number_matrix(basis, fermion_mode(0, 0));
    const OperatorMatrix n1d = number_matrix(basis, fermion_mode(0, 1));
    const OperatorMatrix n2u = number_matrix(basis, fermion_mode(1, 0));
    const OperatorMatrix n2d = number_matrix(basis, fermion_mode(1, 1));
    const double a2 = 2.0 * ref.alpha;

    double res = 0.0;
    for (int ip = 0; ip < 5; ++ip)
        for (int iq = 0; iq < 5; ++iq) {
            const double phi = 0.5 * kPi * ip / 4.0;
            const double vphi = 0.5 * kPi * iq / 4.0;
            std::vector<cplx> psi(16);
            for (int k = 0; k < 16; ++k)
                psi[k] = std::exp(cplx(0, vphi)) * std::cos(phi) * ref.floor_state[k] +
                         std::exp(cplx(0, -vphi)) * std::sin(phi) * ref.ceiling_state[k];
            const ComplexMatrix rho = outer(psi);

            // <H_F>/U = -cos(2 phi) / (2 cos(2 alpha)): the extremal energies
            // are ±U/(2 cos 2a), so the 1/2 is forced by the t=0 spectrum.
            const double energy = trace_product(h, rho).real();
            const double want_e = -U * std::cos(2 * phi) / (2.0 * std::cos(a2));
            res = std::max(res, std::abs(energy - want_e));

            const double nu = 0.25 * std::cos(a2) *
                              (std::tan(a2) * std::sin(2 * phi) * std::cos(2 * vphi) -
                               std::cos(2 * phi));
            res = std::max(res, std::abs(pair_correlation(rho, n1u, n1d) - nu));
            res = std::max(res, std::abs(pair_correlation(rho, n2u, n2d) - nu));
        }
    return res;
}

std::vector<CheckItem> run_closed_form_checks() {
    std::vector<CheckItem> items;
    items.push_back(make_check("fermion anticommutators exact (L=2, 16-dim)",
                               fermi_anticommutator_residual(4), 0.0));
    items.push_back(make_check("boson commutators on projected subspace (2 modes, cap 4)",
                               bose_projected_commutator_residual(2, 4), 1e-12));
    items.push_back(make_check("two-site Bose H matches closed 3x3 matrix (t/U=-1e-2, U=-1)",
                               bose_built_vs_closed_matrix_residual(0.01, -1.0), 1e-14));
    for (double r : {-1e-2, -1.0, -10.0})
        items.push_back(make_check(
            "two-site Bose spectrum vs closed forms (t/U=" + format_double(r) + ")",
            bose_spectrum_relative_residual(r * -1.0, -1.0), 1e-12));
    items.push_back(make_check("u diagonalizes the two-site Bose matrix",
                               bose_u_diagonalization_residual(0.01, -1.0), 1e-12));
    items.push_back(make_check("[H_B, N] = 0", bose_number_commutation_residual(0.01, -1.0), 1e-12));
    items.push_back(
        make_check("Fermi t=0 spectrum groups (-U/2 x4, 0 x8, U/2 x4)",
                   fermi_t0_spectrum_residual(1.0), 1e-12));
    items.push_back(make_check("Fermi floor/ceiling eigenstates and energies (t/U=1e-3)",
                               fermi_extremal_state_residual(1e-3, 1.0), 1e-10));
    items.push_back(make_check("[H_F, N_up] = [H_F, N_down] = 0",
                               fermi_number_commutation_residual(1e-3, 1.0), 1e-12));
    items.push_back(make_check("thermal state is a fixed point (Bose, gamma_D=0)",
                               thermal_fixed_point_residual(ParticleKind::Boson, 0.01, -1.0, 100.0),
                               1e-10));
    items.push_back(make_check("thermal state is a fixed point (Fermi, gamma_D=0)",
                               thermal_fixed_point_residual(ParticleKind::Fermion, 1e-3, 1.0, 100.0),
                               1e-10));
    items.push_back(make_check("Q^D vanishes on every Fock state (Bose)",
                               fock_state_qd_residual(ParticleKind::Boson, 0.01, -1.0), 1e-14));
    items.push_back(make_check("Q^D vanishes on every Fock state (Fermi)",
                               fock_state_qd_residual(ParticleKind::Fermion, 1e-3, 1.0), 1e-14));
    items.push_back(make_check("Bose parametrized-rho energy and correlation formulas",
                               bose_parametrized_formula_residual(0.01, -1.0), 1e-12));
    items.push_back(make_check("Fermi floor/ceiling superposition formulas",
                               fermi_superposition_formula_residual(1e-3, 1.0), 1e-12));
    return items;
}

}  // namespace disent
