#include <doctest.h>

#include <cmath>

#include "disent/errors.hpp"
#include "disent/io.hpp"
#include "disent/steady.hpp"

using namespace disent;

namespace {

struct Setup {
    ModelSpec spec;
    OccupationBasis basis;
    ComplexMatrix h;
    PairList pairs;
    std::vector<OperatorMatrix> nops;
    std::vector<int> blocks;
};

Setup make_setup(ParticleKind kind, double t, double U) {
    Setup s{{}, OccupationBasis::enumerate(1, Statistics::boson(1)), {}, {}, {}, {}};
    s.spec.statistics = kind;
    s.spec.sites = 2;
    s.spec.hopping = t;
    s.spec.interaction = U;
    if (kind == ParticleKind::Boson) s.spec.sector = 2;
    s.basis = model_basis(s.spec);
    s.h = build_hamiltonian(s.spec, s.basis);
    s.pairs = interaction_pairs(s.spec);
    for (int m = 0; m < s.basis.modes(); ++m) s.nops.push_back(number_matrix(s.basis, m));
    for (int i = 0; i < s.basis.dim(); ++i) s.blocks.push_back(s.basis.block_key(i));
    return s;
}

}  // namespace

TEST_CASE("thermal state limits") {
    const auto s = make_setup(ParticleKind::Boson, 0.01, -1.0);

    SUBCASE("beta = 0 is maximally mixed") {
        const auto rho = thermal_state(s.h, 0.0);
        CHECK(max_abs_diff(rho.matrix, scale(ComplexMatrix::identity(3), 1.0 / 3.0)) < 1e-14);
    }

    SUBCASE("large beta projects onto the ground state") {
        const auto es = eigh(s.h);
        const double gap = es.values[1] - es.values[0];
        const double beta = 60.0 / gap;
        const auto rho = thermal_state(s.h, beta);
        ComplexMatrix proj(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) proj(i, j) = es.vectors(i, 0) * std::conj(es.vectors(j, 0));
        CHECK(max_abs_diff(rho.matrix, proj) < 1e-9);
    }

    SUBCASE("weights follow the closed-form energies") {
        const double beta = 100.0;
        const auto ref = two_site_bose_reference(0.01, -1.0);
        const auto rho = thermal_state(two_site_bose_closed_matrix(0.01, -1.0), beta);
        // Diagonal weights in the eigenbasis are e^{-beta E_n}/Z.
        double z = 0.0;
        for (double e : ref.energies) z += std::exp(-beta * (e - ref.energies[2]));
        for (int n = 0; n < 3; ++n) {
            cplx w{};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    w += std::conj(ref.u(i, n)) * rho.matrix(i, j) * ref.u(j, n);
            const double want = std::exp(-beta * (ref.energies[n] - ref.energies[2])) / z;
            CHECK(std::abs(w.real() - want) < 1e-12);
        }
        CHECK(std::abs(trace(rho.matrix) - 1.0) < 1e-12);
    }
}

TEST_CASE("find_steady_state at gamma_D = 0 returns the thermal state") {
    const auto s = make_setup(ParticleKind::Boson, 0.01, -1.0);
    EvolutionParams p;
    p.beta = 100.0;
    p.gamma_h = 1.0;
    p.gamma_d = 0.0;
    p.t_max = 30.0;
    const auto rho0 = thermal_state(s.h, p.beta);
    const auto res = find_steady_state(rho0, s.h, p, s.pairs, s.nops, {}, &s.blocks);
    CHECK(res.reason == Termination::SteadyState);
    CHECK(res.residual <= 1e-10);
    CHECK(res.record.energy ==
          doctest::Approx(trace_product(s.h, rho0.matrix).real()).epsilon(1e-10));
}

TEST_CASE("perturbation helper: norm, trace, blocks, determinism") {
    const auto s = make_setup(ParticleKind::Fermion, 1e-3, 1.0);
    const auto rho0 = thermal_state(s.h, 100.0);

    const auto p1 = perturb_density(rho0, 1e-6, 7, s.blocks);
    const auto p2 = perturb_density(rho0, 1e-6, 7, s.blocks);
    CHECK(max_abs_diff(p1.matrix, p2.matrix) == 0.0);  // seeded -> reproducible

    const auto p3 = perturb_density(rho0, 1e-6, 8, s.blocks);
    CHECK(max_abs_diff(p1.matrix, p3.matrix) > 0.0);

    CHECK(std::abs(trace(p1.matrix) - 1.0) < 1e-12);
    CHECK(min_eigenvalue(p1.matrix) > -1e-15);
    // Stays within the conserved blocks.
    double leak = 0.0;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
            if (s.blocks[i] != s.blocks[j]) leak = std::max(leak, std::abs(p1.matrix(i, j)));
    CHECK(leak == 0.0);

    CHECK_THROWS_AS(perturb_density(rho0, 0.1, 0, s.blocks), ParameterError);
}

TEST_CASE("detect_transition on synthetic curves") {
    SweepResult result;
    const auto push = [&](double c, double e) {
        SweepPoint p;
        p.control = c;
        p.record.energy = e;
        result.points.push_back(p);
    };

    SUBCASE("all points on the ground branch give none") {
        for (double c = 0.0; c < 1.0; c += 0.1) push(c, -1.0);
        CHECK_FALSE(detect_transition(result, -1.0, 1.0, 0.05).has_value());
    }

    SUBCASE("synthetic step between grid points is bracketed") {
        push(0.35, -1.0);
        push(0.45, -1.0);
        push(0.55, -0.2);  // jump past threshold
        push(0.65, -0.1);
        const auto est = detect_transition(result, -1.0, 1.0, 0.05);
        REQUIRE(est.has_value());
        CHECK(*est > 0.45);
        CHECK(*est < 0.55);
    }

    SUBCASE("empty result gives none") {
        SweepResult empty;
        CHECK_FALSE(detect_transition(empty, -1.0, 1.0, 0.05).has_value());
    }
}

TEST_CASE("single-point gamma_D = 0 sweep reproduces the thermal energy") {
    const auto s = make_setup(ParticleKind::Boson, 0.01, -1.0);
    SweepSpec spec;
    spec.model = s.spec;
    spec.params.beta = 100.0;
    spec.params.gamma_h = 1.0;
    spec.params.t_max = 30.0;
    spec.control = {0.0};
    spec.xi = 0.0;  // exactly thermal start
    const auto result = sweep(spec, s.h, s.pairs, s.nops);
    REQUIRE(result.points.size() == 1);
    CHECK(result.points[0].converged);
    CHECK(result.points[0].residual <= 1e-10);
    const double thermal_e = trace_product(s.h, thermal_state(s.h, 100.0).matrix).real();
    CHECK(result.points[0].record.energy == doctest::Approx(thermal_e).epsilon(1e-9));
    CHECK_FALSE(result.critical_estimate.has_value());
}

TEST_CASE("sweep validation errors") {
    const auto s = make_setup(ParticleKind::Boson, 0.01, -1.0);
    SweepSpec spec;
    spec.model = s.spec;
    spec.control = {};
    CHECK_THROWS_AS(sweep(spec, s.h, s.pairs, s.nops), ParameterError);
    spec.control = {0.2, 0.1};
    CHECK_THROWS_AS(sweep(spec, s.h, s.pairs, s.nops), ParameterError);
}

TEST_CASE("sweeps with the same seed are bit-reproducible") {
    const auto s = make_setup(ParticleKind::Boson, 0.01, -1.0);
    SweepSpec spec;
    spec.model = s.spec;
    spec.params.beta = 100.0;
    spec.params.gamma_h = 1.0;
    spec.params.t_max = 2.0;  // short: reproducibility only
    spec.control = {0.1, 0.3};
    spec.seed = 12345;
    const auto r1 = sweep(spec, s.h, s.pairs, s.nops);
    const auto r2 = sweep(spec, s.h, s.pairs, s.nops);
    CHECK(sweep_csv(r1, 2) == sweep_csv(r2, 2));

    spec.continuation = false;  // parallel path must preserve grid order
    const auto r3 = sweep(spec, s.h, s.pairs, s.nops);
    CHECK(r3.points[0].control == 0.1);
    CHECK(r3.points[1].control == 0.3);
}

TEST_CASE("small gamma_D keeps the Bose steady energy on the ground branch") {
    const auto s = make_setup(ParticleKind::Boson, 0.01, -1.0);
    EvolutionParams p;
    p.beta = 100.0;
    p.gamma_h = 1.0;
    p.gamma_d = 10.0;  // control 0.1
    p.t_max = 40.0;
    const auto res = find_steady_state(thermal_state(s.h, p.beta), s.h, p, s.pairs, s.nops);
    const double e3 = two_site_bose_reference(0.01, -1.0).energies[2];
    CHECK(res.reason == Termination::SteadyState);
    CHECK(std::abs(res.record.energy - e3) < 1e-3);
}

TEST_CASE("far above threshold the Fermi steady state leaves the floor") {
    const auto s = make_setup(ParticleKind::Fermion, 1e-3, 1.0);
    EvolutionParams p;
    p.beta = 100.0;
    p.gamma_h = 1.0;
    p.gamma_d = 500.0;  // control 5
    p.t_max = 25.0;
    p.dt = 2e-4;
    std::vector<int> blocks;
    for (int i = 0; i < s.basis.dim(); ++i) blocks.push_back(s.basis.block_key(i));
    const auto rho0 = perturb_density(thermal_state(s.h, p.beta), 1e-6, 3, blocks);
    const auto res = find_steady_state(rho0, s.h, p, s.pairs, s.nops, {1.0, true}, &blocks);
    const double floor_e = two_site_fermi_reference(1e-3, 1.0).floor_energy;
    CHECK(res.record.energy > floor_e + 0.05);
}

TEST_CASE("transition estimate is stable under 2x grid refinement") {
    const auto s = make_setup(ParticleKind::Boson, 0.01, -1.0);
    SweepSpec spec;
    spec.model = s.spec;
    spec.params.beta = 100.0;
    spec.params.gamma_h = 1.0;
    spec.params.t_max = 40.0;
    spec.seed = 0;

    const auto grid = [](double step) {
        std::vector<double> g;
        for (double c = 0.3; c <= 0.7 + 1e-9; c += step) g.push_back(c);
        return g;
    };
    spec.control = grid(0.05);
    const auto coarse = sweep(spec, s.h, s.pairs, s.nops);
    spec.control = grid(0.025);
    const auto fine = sweep(spec, s.h, s.pairs, s.nops);

    REQUIRE(coarse.critical_estimate.has_value());
    REQUIRE(fine.critical_estimate.has_value());
    CHECK(std::abs(*coarse.critical_estimate - *fine.critical_estimate) < 0.05);
}

TEST_CASE("U_e is non-increasing along a converging trajectory tail") {
    const auto s = make_setup(ParticleKind::Boson, 0.01, -1.0);
    EvolutionParams p;
    p.beta = 100.0;
    p.gamma_h = 1.0;
    p.gamma_d = 25.0;
    p.t_max = 20.0;
    std::vector<int> blocks;
    for (int i = 0; i < s.basis.dim(); ++i) blocks.push_back(s.basis.block_key(i));
    const auto rho0 = perturb_density(thermal_state(s.h, p.beta), 1e-6, 2, blocks);
    const auto out = evolve(rho0, s.h, p, s.pairs, s.nops, 50, {}, &blocks);

    REQUIRE(out.trajectory.size() > 6);
    const size_t tail = out.trajectory.size() / 2;
    for (size_t i = tail + 1; i < out.trajectory.size(); ++i) {
        const double prev = effective_free_energy(out.trajectory[i - 1], p, true);
        const double now = effective_free_energy(out.trajectory[i], p, true);
        CHECK(now <= prev + 1e-8 * 50);
    }
}

TEST_CASE("effective free energy accessors") {
    const auto s = make_setup(ParticleKind::Boson, 0.01, -1.0);
    EvolutionParams p;
    p.beta = 100.0;
    p.gamma_h = 1.0;
    p.gamma_d = 5.0;
    const auto rho0 = thermal_state(s.h, p.beta);
    const auto rec = observables(rho0.matrix, s.h, p, s.pairs, s.nops);

    const double low_t = effective_free_energy(rec, p, true);
    CHECK(low_t == doctest::Approx(rec.energy + p.gamma_d / p.gamma_h * rec.q_d_expect / p.beta)
                       .epsilon(1e-12));
    const double full = effective_free_energy(rec, p, false);
    CHECK(full < low_t);  // entropy lowers the free energy

    EvolutionParams g0 = p;
    g0.gamma_h = 0.0;
    CHECK_THROWS_AS(effective_free_energy(rec, g0, true), UsageError);

    // Fock state: <Q^D> = 0, so low-T U_e reduces to the energy.
    ComplexMatrix fock(3);
    fock(1, 1) = 1.0;
    const auto frec = observables(fock, s.h, p, s.pairs, s.nops);
    CHECK(effective_free_energy(frec, p, true) == doctest::Approx(frec.energy).epsilon(1e-12));
}
