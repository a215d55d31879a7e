#pragma once

#include "mg/equivalence.hpp"
#include "mg/errors.hpp"
#include "mg/fieldgrid.hpp"
#include "mg/models.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

namespace mg {

struct LocalGen {
    RhoExpr sigma;
};
// sigma(x) = int^x [alpha(rho) + beta(rho) S_x] dx'
struct NonlocalGen {
    RhoExpr alpha, beta;
};
// sigma = coeff * ln kappa(rho), for kappa outside the monomials
struct LogKappaGen {
    Rational coeff;
    RhoExpr kappa;
};
using GeneratorSpec = std::variant<LocalGen, NonlocalGen, LogKappaGen>;

inline std::string describe(const GeneratorSpec& g)
{
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LocalGen>)
                return "local: sigma = " + v.sigma.str();
            else if constexpr (std::is_same_v<T, NonlocalGen>)
                return "nonlocal: sigma = int^x [" + v.alpha.str() + " + (" + v.beta.str() + ") S_x] dx";
            else
                return "local: sigma = (" + v.coeff.str() + ") ln(" + v.kappa.str() + ")";
        },
        g);
}

inline RhoExpr anomalous_sigma(const Rational& q, const Rational& D)
{
    if (q == 1)
        return RhoExpr::log_rho(D / 2);
    const Rational k = D / (2 * (q - 1));
    return RhoExpr::term(k * q, q - 1) - RhoExpr::constant(k);
}

inline GeneratorSpec derive_generator(const ModelSpec& model)
{
    return std::visit(
        [](const auto& m) -> GeneratorSpec {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Dnls>) {
                return NonlocalGen{RhoExpr::rho(m.b4 / 2), RhoExpr{}};
            } else if constexpr (std::is_same_v<T, Eip>) {
                return NonlocalGen{RhoExpr{}, RhoExpr::rho(m.kappa)};
            } else if constexpr (std::is_same_v<T, DoebnerGoldin>) {
                return LocalGen{RhoExpr::log_rho(m.D / 2)};
            } else if constexpr (std::is_same_v<T, Entropic>) {
                // grad sigma = J/(2 rho) = -(D/2) grad ln kappa
                if (auto p = monomial_power(m.kappa))
                    return LocalGen{RhoExpr::log_rho(-m.D * *p / 2)};
                return LogKappaGen{-m.D / 2, m.kappa};
            } else if constexpr (std::is_same_v<T, FiveFunction>) {
                return LocalGen{m.f[4].div_rho().integral().without_constant()};
            } else if constexpr (std::is_same_v<T, GaugedAnomalous>) {
                return LocalGen{anomalous_sigma(m.q, m.D)};
            } else {
                return LocalGen{RhoExpr{}};
            }
        },
        model);
}

struct CurlCheck {
    bool holds = true;
    std::string witness;
};

inline CurlCheck curl_condition_holds(const ModelSpec& model, int n_dims)
{
    if (n_dims < 1)
        throw Error(ErrorKind::DomainError, "n_dims must be >= 1");
    if (n_dims == 1)
        return {true, "one dimension: J/rho is always a gradient"};
    const GeneratorSpec g = derive_generator(model);
    if (const auto* nl = std::get_if<NonlocalGen>(&g)) {
        if (!nl->beta.is_zero())
            return {false, "J/rho = 2 (" + nl->beta.str() + ") grad S is not curl-free"};
        if (!nl->alpha.is_zero())
            return {false, "J/rho = 2 (" + nl->alpha.str() + ") e_x is not curl-free (one-dimensional family)"};
    }
    return {true, "J/(2 rho) = grad sigma(rho)"};
}

inline double clamp_floor(double r, double floor) { return r > floor ? r : floor; }

inline RVec evaluate_generator(const GeneratorSpec& gen, const HydroField& h, double floor = default_floor)
{
    const std::size_t n = h.rho.size();
    RVec sigma(n, 0.0);
    std::visit(
        [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, LocalGen>) {
                const detail::CompiledExpr e(g.sigma);
                const bool pos = g.sigma.needs_positive();
                for (std::size_t i = 0; i < n; ++i)
                    sigma[i] = pos ? e(clamp_floor(h.rho[i], floor)) : g.sigma.eval(h.rho[i]);
            } else if constexpr (std::is_same_v<T, LogKappaGen>) {
                const detail::CompiledExpr k(g.kappa);
                const double c = to_double(g.coeff);
                for (std::size_t i = 0; i < n; ++i) {
                    const double kv = k(clamp_floor(h.rho[i], floor));
                    if (!(kv > 0))
                        throw Error(ErrorKind::DomainError, "kappa(rho) must be positive");
                    sigma[i] = c * std::log(kv);
                }
            } else {
                RVec integrand(n, 0.0);
                const RVec sx = phase_derivative(h);
                for (std::size_t i = 0; i < n; ++i) {
                    const double r = h.rho[i];
                    auto ev = [&](const RhoExpr& e) {
                        if (e.is_zero())
                            return 0.0;
                        return e.needs_positive() ? e.eval(clamp_floor(r, floor)) : e.eval(r);
                    };
                    integrand[i] = ev(g.alpha) + ev(g.beta) * sx[i];
                }
                if (h.grid.periodic()) {
                    double loop = 0.0;
                    for (double v : integrand)
                        loop += v;
                    loop *= h.grid.h();
                    const double r = std::remainder(loop, 2 * std::numbers::pi);
                    if (std::abs(r) > 1e-8)
                        throw Error(ErrorKind::PeriodicityViolation,
                                    "loop integral of the generator density is " + std::to_string(loop) +
                                        " (not a multiple of 2 pi)");
                }
                sigma = cumulative_integral(integrand, h.grid);
            }
        },
        gen);
    return sigma;
}

// sigma = cumulative_integral(J / (2 rho)); its discrete derivative reproduces J/(2 rho) on every
// row the inverse pair covers, which makes the current collapse exact up to round-off
inline RVec path_generator(const ModelSpec& model, const HydroField& h, double floor = default_floor,
                           std::span<const double> A = {})
{
    RVec J = current_functional(model, h, floor, A);
    for (std::size_t i = 0; i < J.size(); ++i)
        J[i] /= 2 * clamp_floor(h.rho[i], floor);
    return cumulative_integral(J, h.grid);
}

inline ComplexField apply_gauge(const ComplexField& psi, std::span<const double> sigma)
{
    if (sigma.size() != psi.values.size())
        throw Error(ErrorKind::DomainError, "generator and field sizes differ");
    ComplexField out{CVec(sigma.size()), psi.grid};
    for (std::size_t i = 0; i < sigma.size(); ++i)
        out.values[i] = std::polar(1.0, sigma[i]) * psi.values[i];
    return out;
}

struct CoeffRow {
    std::string name, before, after;
};

struct TransformResult {
    ModelSpec transformed;
    GeneratorSpec generator;
    std::vector<CoeffRow> coefficient_report;
    std::vector<std::string> notes;
};

// Doebner-Goldin coefficient map under sigma = (D/2) ln rho
inline DoebnerGoldin dg_map(const DoebnerGoldin& m)
{
    const auto& c = m.c;
    const Rational D = m.D;
    DoebnerGoldin t;
    t.c[0] = c[0] - D;
    t.c[1] = c[1] - c[0] * D / 2;
    t.c[2] = c[2];
    t.c[3] = c[3] - (c[2] - 1) * D;
    t.c[4] = c[4] - c[3] * D / 2 + (c[2] - 1) * D * D / 4;
    t.D = 0;
    return t;
}

inline Rational dnls_b2_map(const Dnls& m) { return m.b2 - m.b3 * m.b4 / 2 - m.b4 * m.b4 / 4; }

inline TransformResult transform_model(const ModelSpec& model)
{
    TransformResult r{model, derive_generator(model), {}, {}};
    auto row = [&](std::string name, const auto& a, const auto& b) {
        r.coefficient_report.push_back({std::move(name), a.str(), b.str()});
    };
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Dnls>) {
                Dnls t{m.b1, dnls_b2_map(m), m.b3, Rational(0)};
                row("b1", m.b1, t.b1);
                row("b2", m.b2, t.b2);
                row("b3", m.b3, t.b3);
                row("b4", m.b4, t.b4);
                if (m.canonical() && m.b1 == 0 && m.b2 == 0 && m.b4 != 0)
                    r.notes.push_back("canonical b1 = b2 = 0 input: general map gives b2~ = 3 b3^2/16; the "
                                      "special-case value 3 b3^2/4 disagrees with it");
                r.transformed = t;
            } else if constexpr (std::is_same_v<T, Eip>) {
                r.transformed = EipReal{m.kappa};
                row("kappa", m.kappa, m.kappa);
                r.notes.push_back("W~ = -2 kappa rho/(1 + kappa rho) S_x^2 + (kappa/2) rho (ln rho)_xx");
            } else if constexpr (std::is_same_v<T, DoebnerGoldin>) {
                const DoebnerGoldin t = dg_map(m);
                for (int k = 0; k < 5; ++k)
                    row("c" + std::to_string(k + 1), m.c[k], t.c[k]);
                row("D", m.D, t.D);
                r.notes.push_back("c4~ = c4 - (c3 - 1) D and c5~ = c5 - c4 D/2 + (c3 - 1) D^2/4 (derived; the "
                                  "alternate form c4 + (c3 - 1) D, c5 - c4 D - (c3 - 1) D^2/4 fails the reality check)");
                r.transformed = t;
            } else if constexpr (std::is_same_v<T, Entropic>) {
                r.transformed = EntropicReal{m.kappa, m.D, m.G};
                row("D", m.D, m.D);
                r.notes.push_back("W~ = -(D^2/2) [f1 Lap rho + f2 (grad rho)^2] + G, f1 = rho ((ln kappa)')^2, "
                                  "f2 = f1'/2; generator sign fixed by grad sigma = J/(2 rho)");
            } else if constexpr (std::is_same_v<T, FiveFunction>) {
                const auto& g = std::get<LocalGen>(r.generator);
                const FiveFunction t = push_forward(m, g.sigma);
                for (int k = 0; k < 5; ++k)
                    r.coefficient_report.push_back({"f" + std::to_string(k + 1), m.f[k].str(), t.f[k].str()});
                r.transformed = t;
            } else if constexpr (std::is_same_v<T, GaugedAnomalous>) {
                const Rational beta = 2 * m.alpha - m.q * m.q * m.D * m.D / 2;
                row("alpha->beta", m.alpha, beta);
                r.transformed = AnomalousReal{m.q, beta};
            } else {
                r.notes.push_back("already real: identity transformation");
            }
        },
        model);
    return r;
}

} // namespace mg
