#include "disent/steady.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "disent/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace disent {

DensityMatrix thermal_state(const ComplexMatrix& h, double beta) {
    if (beta < 0.0) throw ParameterError("beta must be >= 0");
    const EighResult es = eigh(h);
    const double e_min = es.values.front();
    double z = 0.0;
    for (double e : es.values) z += std::exp(-beta * (e - e_min));
    if (!(z > 0.0) || !std::isfinite(z)) throw NumericError("thermal partition sum failed");
    ComplexMatrix rho = spectral_apply(es, [&](double e) { return std::exp(-beta * (e - e_min)) / z; });
    hermitize_inplace(rho);
    return DensityMatrix{std::move(rho)};
}

DensityMatrix perturb_density(const DensityMatrix& rho, double xi, uint64_t seed,
                              const std::vector<int>& block_ids) {
    if (xi < 0.0 || xi > 1e-3) throw ParameterError("perturbation scale must lie in [0, 1e-3]");
    const int d = rho.matrix.dim();
    if (xi == 0.0) return rho;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix p(d);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            if (!block_ids.empty() && block_ids[i] != block_ids[j]) continue;
            if (i == j) {
                p(i, i) = gauss(rng);
            } else {
                const cplx v(gauss(rng), gauss(rng));
                p(i, j) = v;
                p(j, i) = std::conj(v);
            }
        }
    }
    const cplx tr = trace(p);
    for (int i = 0; i < d; ++i) p(i, i) -= tr / static_cast<double>(d);
    const double norm = frobenius_norm(p);
    if (norm > 0.0)
        for (cplx& v : p.data()) v *= xi / norm;

    ComplexMatrix m = add(rho.matrix, p);
    // The thermal tail can sit far below xi; clamp the spectrum so the
    // perturbed state stays a valid density matrix.
    const EighResult es = eigh(m);
    double z = 0.0;
    for (double w : es.values) z += std::max(w, 0.0);
    ComplexMatrix repaired = spectral_apply(es, [&](double w) { return std::max(w, 0.0) / z; });
    hermitize_inplace(repaired);
    return DensityMatrix{std::move(repaired)};
}

SteadyResult find_steady_state(const DensityMatrix& rho0, const ComplexMatrix& h,
                               const EvolutionParams& params, const PairList& pairs,
                               const std::vector<OperatorMatrix>& number_ops,
                               const ObservableLayout& layout,
                               const std::vector<int>* block_ids) {
    EvolveOutcome out = evolve(rho0, h, params, pairs, number_ops, /*record_every=*/0,
                               layout, block_ids);
    SteadyResult res;
    res.record = observables(out.final_state.matrix, h, params, pairs, number_ops, layout,
                             out.final_time);
    res.state = std::move(out.final_state);
    res.residual = out.final_residual;
    res.reason = out.reason;
    return res;
}

namespace {

double vector_weight(const ComplexMatrix& rho, const EighResult& hspec, int column) {
    const int d = rho.dim();
    cplx w{};
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            w += std::conj(hspec.vectors(i, column)) * rho(i, j) * hspec.vectors(j, column);
    return w.real();
}

}  // namespace

SweepResult sweep(const SweepSpec& spec, const ComplexMatrix& h, const PairList& pairs,
                  const std::vector<OperatorMatrix>& number_ops) {
    if (spec.control.empty()) throw ParameterError("control grid is empty");
    for (size_t i = 1; i < spec.control.size(); ++i)
        if (spec.control[i] <= spec.control[i - 1])
            throw ParameterError("control grid must be strictly monotone");
    if (spec.xi < 0.0 || spec.xi > 1e-3) throw ParameterError("xi must lie in [0, 1e-3]");
    spec.params.validate();

    const OccupationBasis basis = model_basis(spec.model);
    const std::vector<int> block_ids = [&] {
        std::vector<int> ids(basis.dim());
        for (int i = 0; i < basis.dim(); ++i) ids[i] = basis.block_key(i);
        return ids;
    }();
    const ObservableLayout layout{std::abs(spec.model.interaction),
                                  spec.model.statistics == ParticleKind::Fermion};
    const EighResult hspec = eigh(h);
    const double u_abs = std::abs(spec.model.interaction);
    const DensityMatrix rho_thermal = thermal_state(h, spec.params.beta);

    const auto gamma_d_of = [&](double control) {
        return control * spec.params.beta * u_abs * spec.params.gamma_h;
    };

    const auto run_point = [&](double control, const DensityMatrix& init, uint64_t seed) {
        EvolutionParams p = spec.params;
        p.gamma_d = gamma_d_of(control);
        const DensityMatrix start = perturb_density(init, spec.xi, seed, block_ids);
        SteadyResult st = find_steady_state(start, h, p, pairs, number_ops, layout, &block_ids);
        SweepPoint pt;
        pt.control = control;
        pt.record = st.record;
        pt.reason = st.reason;
        pt.residual = st.residual;
        pt.converged = st.reason == Termination::SteadyState;
        pt.ground_occupation = vector_weight(st.state.matrix, hspec, 0);
        pt.off_extremal_occupation = std::clamp(
            1.0 - pt.ground_occupation - vector_weight(st.state.matrix, hspec, basis.dim() - 1),
            0.0, 1.0);
        return std::pair<SweepPoint, DensityMatrix>{std::move(pt), std::move(st.state)};
    };

    SweepResult result;
    result.points.resize(spec.control.size());

    if (spec.continuation) {
        DensityMatrix carry = rho_thermal;
        for (size_t i = 0; i < spec.control.size(); ++i) {
            auto [pt, state] = run_point(spec.control[i], carry, spec.seed + i);
            result.points[i] = std::move(pt);
            carry = std::move(state);
        }
    } else {
        // Independent initializations: grid points are embarrassingly parallel.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (long long i = 0; i < static_cast<long long>(spec.control.size()); ++i) {
            auto [pt, state] = run_point(spec.control[i], rho_thermal, spec.seed + i);
            result.points[i] = std::move(pt);
        }
    }

    result.critical_estimate =
        detect_transition(result, hspec.values.front(), u_abs, spec.threshold_fraction);
    return result;
}

std::optional<double> detect_transition(const SweepResult& result, double ground_energy,
                                        double u_abs, double threshold_fraction) {
    if (result.points.empty()) return std::nullopt;
    const double threshold = threshold_fraction * u_abs;
    for (size_t i = 0; i < result.points.size(); ++i) {
        const double depart = std::abs(result.points[i].record.energy - ground_energy);
        if (depart <= threshold) continue;
        if (i == 0) return result.points[0].control;
        const double prev = std::abs(result.points[i - 1].record.energy - ground_energy);
        const double c0 = result.points[i - 1].control;
        const double c1 = result.points[i].control;
        if (depart <= prev) return c1;
        return c0 + (c1 - c0) * (threshold - prev) / (depart - prev);
    }
    return std::nullopt;
}

double effective_free_energy(const ObservableRecord& record, const EvolutionParams& params,
                             bool low_temperature) {
    if (params.gamma_h <= 0.0)
        throw UsageError("effective free energy is undefined for gamma_h = 0");
    if (low_temperature)
        return record.energy + (params.gamma_d / params.gamma_h) * record.q_d_expect / params.beta;
    if (!record.u_e) throw UsageError("record carries no effective free energy");
    return *record.u_e;
}

}  // namespace disent
