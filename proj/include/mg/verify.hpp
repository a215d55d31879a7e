#pragma once

#include "mg/equivalence.hpp"
#include "mg/errors.hpp"
#include "mg/fieldgrid.hpp"
#include "mg/gauge.hpp"
#include "mg/models.hpp"
#include "mg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mg {

struct EquivalenceReport {
    double max_rho_discrepancy = 0.0;
    double phase_relation_residual = 0.0;
    double current_collapse_residual = 0.0;
    double N_drift_original = 0.0;
    double N_drift_transformed = 0.0;
    std::string generator;
    std::string transformed_family;
};

struct LinearizationReport {
    std::string D;
    std::string kbar_sq;
    std::string kbar_exact;  // empty when 1 - D^2 is not a rational square
    double kbar = 1.0;
    double max_rho_discrepancy = 0.0;
    double N_drift_direct = 0.0;
};

// fourth-order running integral F_0 = 0 with zero values outside the grid
inline RVec cumulative_integral4(std::span<const double> f, const Grid1D& g)
{
    const int n = static_cast<int>(f.size());
    const double h = g.h();
    auto at = [&](int i) { return (i < 0 || i >= n) ? 0.0 : f[i]; };
    RVec F(n, 0.0);
    for (int i = 0; i + 1 < n; ++i)
        F[i + 1] = F[i] + h / 24 * (-at(i - 1) + 13 * at(i) + 13 * at(i + 1) - at(i + 2));
    return F;
}

// sigma of a state: closed form for local generators, high-order quadrature of J/(2 rho) otherwise
inline RVec generator_on_state(const ModelSpec& model, const GeneratorSpec& gen, const ComplexField& psi,
                               const DiffOps& ops, double floor)
{
    if (!std::holds_alternative<NonlocalGen>(gen)) {
        HydroField h{RVec(psi.values.size()), RVec(psi.values.size(), 0.0), psi.grid};
        for (std::size_t i = 0; i < h.rho.size(); ++i)
            h.rho[i] = std::norm(psi.values[i]);
        return evaluate_generator(gen, h, floor);
    }
    NonlinearTerm nl(model, ops, floor);
    CVec N;
    RVec J;
    nl(psi.values, N, &J);
    for (std::size_t i = 0; i < J.size(); ++i)
        J[i] /= 2 * clamp_floor(std::norm(psi.values[i]), floor);
    if (psi.grid.periodic()) {
        double loop = 0.0;
        for (double v : J)
            loop += v;
        loop *= psi.grid.h();
        if (std::abs(std::remainder(loop, 2 * std::numbers::pi)) > 1e-8)
            throw Error(ErrorKind::PeriodicityViolation, "loop integral of the generator density is " +
                                                             std::to_string(loop) + " (not a multiple of 2 pi)");
    }
    return cumulative_integral4(J, psi.grid);
}

namespace detail {

inline double n_drift(const Trajectory& tr)
{
    double d = 0.0;
    for (const auto& dg : tr.diagnostics)
        d = std::max(d, std::abs(dg.N - tr.diagnostics.front().N));
    return d;
}

// max deviation of arg(phi conj(psi) e^{-i sigma}) from its mean over the well-resolved region
inline double phase_residual(const CVec& phi, const CVec& psi, std::span<const double> sigma)
{
    double rmax = 0.0;
    std::size_t imax = 0;
    for (std::size_t i = 0; i < psi.size(); ++i)
        if (std::norm(psi[i]) > rmax) {
            rmax = std::norm(psi[i]);
            imax = i;
        }
    auto rel = [&](std::size_t i) { return std::arg(phi[i] * std::conj(psi[i]) * std::polar(1.0, -sigma[i])); };
    const double ref = rel(imax);
    std::vector<double> d;
    for (std::size_t i = 0; i < psi.size(); ++i)
        if (std::norm(psi[i]) >= 1e-3 * rmax)
            d.push_back(wrap_pi(rel(i) - ref));
    double mean = 0.0;
    for (double v : d)
        mean += v;
    mean /= static_cast<double>(d.size());
    double r = 0.0;
    for (double v : d)
        r = std::max(r, std::abs(v - mean));
    return r;
}

// || j0[phi_c] - (j0[psi] + J[psi]) || with phi_c = exp(i sigma_path) psi and sigma_path the discrete
// antiderivative of J/(2 rho); the last row is outside the range of the inverse pair
inline double current_collapse(const ModelSpec& model, const ComplexField& psi, double floor)
{
    const HydroField h = to_hydro(psi, floor);
    const RVec sigma = path_generator(model, h, floor);
    const HydroField hp = to_hydro(apply_gauge(psi, sigma), floor);
    const RVec j_psi = bilinear_current(h);
    const RVec j_phi = bilinear_current(hp);
    const RVec J = current_functional(model, h, floor);
    double r = 0.0;
    for (std::size_t i = 0; i + 1 < J.size(); ++i)
        r = std::max(r, std::abs(j_phi[i] - (j_psi[i] + J[i])));
    return r;
}

} // namespace detail

// residuals per snapshot: t, rho discrepancy, phase relation, current collapse
struct ResidualRow {
    double t, rho, phase, current;
};

struct EquivalenceRun {
    EquivalenceReport report;
    Trajectory original, transformed;
    std::vector<ResidualRow> series;
};

inline EquivalenceRun run_equivalence(const ModelSpec& model, const ComplexField& psi0, const SolverConfig& cfg,
                                      const std::optional<ModelSpec>& transformed_override = std::nullopt)
{
    const TransformResult tr = transform_model(model);
    const ModelSpec target = transformed_override ? *transformed_override : tr.transformed;
    const DiffOps ops(psi0.grid, cfg.scheme, cfg.fd_order);
    const RVec sigma0 = generator_on_state(model, tr.generator, psi0, ops, cfg.floor);
    const ComplexField phi0 = apply_gauge(psi0, sigma0);

    auto fa = std::async(std::launch::async, [&] { return integrate(model, psi0, cfg); });
    auto fb = std::async(std::launch::async, [&] { return integrate(target, phi0, cfg); });
    EquivalenceRun run;
    run.original = fa.get();
    run.transformed = fb.get();

    EquivalenceReport& rep = run.report;
    rep.generator = describe(tr.generator);
    rep.transformed_family = family_name(target);
    for (std::size_t s = 0; s < run.original.states.size(); ++s) {
        const CVec& pa = run.original.states[s].values;
        const CVec& pb = run.transformed.states[s].values;
        ResidualRow row{run.original.times[s], 0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < pa.size(); ++i)
            row.rho = std::max(row.rho, std::abs(std::norm(pa[i]) - std::norm(pb[i])));
        const RVec sig = generator_on_state(model, tr.generator, run.original.states[s], ops, cfg.floor);
        row.phase = detail::phase_residual(pb, pa, sig);
        row.current = detail::current_collapse(model, run.original.states[s], cfg.floor);
        rep.max_rho_discrepancy = std::max(rep.max_rho_discrepancy, row.rho);
        rep.phase_relation_residual = std::max(rep.phase_relation_residual, row.phase);
        rep.current_collapse_residual = std::max(rep.current_collapse_residual, row.current);
        run.series.push_back(row);
    }
    rep.N_drift_original = detail::n_drift(run.original);
    rep.N_drift_transformed = detail::n_drift(run.transformed);
    return run;
}

inline EquivalenceReport verify_equivalence(const ModelSpec& model, const ComplexField& psi0, const SolverConfig& cfg,
                                            const std::optional<ModelSpec>& transformed_override = std::nullopt)
{
    return run_equivalence(model, psi0, cfg, transformed_override).report;
}

// model whose real nonlinearity is -D^2 times the quantum potential
inline DoebnerGoldin linearizable_dg(const Rational& D)
{
    return {{Rational(0), -D * D / 2, Rational(0), Rational(0), D * D / 4}, Rational(0)};
}

struct LinearizationRun {
    LinearizationReport report;
    Trajectory direct;
    std::vector<ComplexField> linear;  // mapped-back linear evolution at the snapshot times
    std::vector<std::pair<double, double>> series;  // t, rho discrepancy
};

inline LinearizationRun run_linearization(const Rational& D, const ComplexField& psi0, const SolverConfig& cfg)
{
    const LinearizationMap map = guerra_map(D);
    LinearizationRun run;
    LinearizationReport& rep = run.report;
    rep.D = to_string(D);
    rep.kbar_sq = to_string(map.kbar_sq);
    rep.kbar_exact = map.kbar_exact ? to_string(*map.kbar_exact) : std::string();
    rep.kbar = map.kbar;

    run.direct = integrate(linearizable_dg(D), psi0, cfg);
    const ComplexField chi0 = to_linear_field(to_hydro(psi0, cfg.floor), map);
    for (std::size_t s = 0; s < run.direct.states.size(); ++s) {
        const ComplexField chi = propagate_linear_dirichlet(chi0, cfg.diffusion * map.kbar, run.direct.times[s]);
        const CVec& pd = run.direct.states[s].values;
        double d = 0.0;
        for (std::size_t i = 0; i < pd.size(); ++i)
            d = std::max(d, std::abs(std::norm(pd[i]) - std::norm(chi.values[i])));
        rep.max_rho_discrepancy = std::max(rep.max_rho_discrepancy, d);
        run.series.emplace_back(run.direct.times[s], d);
        run.linear.push_back(chi);
    }
    rep.N_drift_direct = detail::n_drift(run.direct);
    return run;
}

inline LinearizationReport verify_linearization(const Rational& D, const ComplexField& psi0, const SolverConfig& cfg)
{
    return run_linearization(D, psi0, cfg).report;
}

} // namespace mg
