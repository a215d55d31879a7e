#pragma once

#include "mg/fieldgrid.hpp"
#include "mg/rational.hpp"
#include "mg/rhoexpr.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mg {

// hydrodynamic derivative-NLS family: W = b1 rho + b2 rho^2 + b3 rho S_x, J = b4 rho^2
struct Dnls {
    Rational b1, b2, b3, b4;

    static Dnls from_wave(const Rational& a1, const Rational& a2, const Rational& a3, const Rational& a4)
    {
        return {a1, a2, a4 - a3, (a3 + a4) / 2};
    }
    bool canonical() const { return b3 == -2 * b4; }
};

// W = c1 R1 + ... + c5 R5, J = D grad(rho)
struct DoebnerGoldin {
    std::array<Rational, 5> c;
    Rational D;

    static DoebnerGoldin canonical_model(const Rational& D, const Rational& c5)
    {
        return {{D, -2 * c5, Rational(0), -D, c5}, D};
    }
    bool canonical() const { return c[0] == D && c[3] == -D && c[2] == 0 && c[1] == -2 * c[4]; }
};

// W = -2 kappa rho S_x^2, J = 2 kappa rho^2 S_x
struct Eip {
    Rational kappa;
};

// W = -D f(rho) Lap S + G(rho), J = -D f(rho) grad rho, f = rho (ln kappa)'
struct Entropic {
    RhoExpr kappa;
    Rational D;
    RhoExpr G;
};

// W = f1 Lap S + f2 rho_x S_x + f3 rho_x^2 + f4 Lap rho, J = 2 f5 rho_x
struct FiveFunction {
    std::array<RhoExpr, 5> f;
    bool operator==(const FiveFunction&) const = default;
};

// charged anomalous diffusion; with A = 0 it is a scalar model
struct GaugedAnomalous {
    Rational q, D, alpha;
};

// real closed forms produced by transformations
struct EipReal {
    Rational kappa;
};
struct EntropicReal {
    RhoExpr kappa;
    Rational D;
    RhoExpr G;
};
struct AnomalousReal {
    Rational q, beta;
};

using ModelSpec = std::variant<Dnls, DoebnerGoldin, Eip, Entropic, FiveFunction, GaugedAnomalous, EipReal,
                               EntropicReal, AnomalousReal>;

inline std::string family_name(const ModelSpec& m)
{
    static const char* names[] = {"dnls",          "doebner-goldin", "eip",          "entropic",      "five-function",
                                  "gauged-anomalous", "eip-real",    "entropic-real", "anomalous-real"};
    return names[m.index()];
}

struct NonlinearityEval {
    RVec W;
    RVec calW;
};

// pointwise local data a nonlinearity depends on; sx is the (covariant) phase gradient,
// sxx its divergence
struct Jet {
    RVec rho, rx, rxx, sx, sxx;
    std::size_t size() const { return rho.size(); }
};

inline Jet jet_from_hydro(const HydroField& h, std::span<const double> A = {})
{
    Jet j;
    j.rho = h.rho;
    j.rx = derivative(h.rho, h.grid);
    j.rxx = derivative(j.rx, h.grid);
    j.sx = phase_derivative(h);
    if (!A.empty())
        for (std::size_t i = 0; i < j.sx.size(); ++i)
            j.sx[i] += A[i];
    j.sxx = derivative(j.sx, h.grid);
    return j;
}

namespace detail {

struct CompiledExpr {
    struct T {
        double c, p;
        int m;
    };
    std::vector<T> ts;
    explicit CompiledExpr(const RhoExpr& e)
    {
        for (const auto& t : e.terms())
            ts.push_back({to_double(t.coeff), to_double(t.p), t.m});
    }
    double operator()(double rho) const
    {
        const double lr = std::log(rho);
        double s = 0.0;
        for (const auto& t : ts) {
            double v = t.c;
            if (t.p != 0.0)
                v *= std::exp(t.p * lr);
            for (int k = 0; k < t.m; ++k)
                v *= lr;
            s += v;
        }
        return s;
    }
};

// kappa'/kappa and its rho-derivative, used by the entropic family
struct LogDeriv {
    CompiledExpr k, k1, k2;
    explicit LogDeriv(const RhoExpr& kappa) : k(kappa), k1(kappa.deriv()), k2(kappa.deriv().deriv()) {}
    double g(double r) const { return k1(r) / k(r); }
    double gprime(double r) const
    {
        const double a = g(r);
        return k2(r) / k(r) - a * a;
    }
};

inline double rpow(double r, const Rational& p) { return std::exp(to_double(p) * std::log(r)); }

} // namespace detail

// W and the current J evaluated pointwise from a jet; rho is clamped at `floor`
struct PointwiseModel {
    ModelSpec model;
    double floor = default_floor;

    void eval(const Jet& j, RVec& W, RVec& J) const
    {
        const std::size_t n = j.size();
        W.assign(n, 0.0);
        J.assign(n, 0.0);
        std::visit([&](const auto& m) { eval_impl(m, j, W, J); }, model);
    }

private:
    double clamp(double r) const { return r > floor ? r : floor; }

    void eval_impl(const Dnls& m, const Jet& j, RVec& W, RVec& J) const
    {
        const double b1 = to_double(m.b1), b2 = to_double(m.b2), b3 = to_double(m.b3), b4 = to_double(m.b4);
        for (std::size_t i = 0; i < j.size(); ++i) {
            const double r = j.rho[i];
            W[i] = b1 * r + b2 * r * r + b3 * r * j.sx[i];
            J[i] = b4 * r * r;
        }
    }
    void eval_impl(const DoebnerGoldin& m, const Jet& j, RVec& W, RVec& J) const
    {
        double c[5];
        for (int k = 0; k < 5; ++k)
            c[k] = to_double(m.c[k]);
        const double D = to_double(m.D);
        for (std::size_t i = 0; i < j.size(); ++i) {
            const double rc = clamp(j.rho[i]), lx = j.rx[i] / rc, sx = j.sx[i];
            const double R1 = j.sxx[i] + lx * sx, R2 = j.rxx[i] / rc, R3 = sx * sx, R4 = sx * lx, R5 = lx * lx;
            W[i] = c[0] * R1 + c[1] * R2 + c[2] * R3 + c[3] * R4 + c[4] * R5;
            J[i] = D * j.rx[i];
        }
    }
    void eval_impl(const Eip& m, const Jet& j, RVec& W, RVec& J) const
    {
        const double k = to_double(m.kappa);
        for (std::size_t i = 0; i < j.size(); ++i) {
            const double r = j.rho[i], sx = j.sx[i];
            W[i] = -2 * k * r * sx * sx;
            J[i] = 2 * k * r * r * sx;
        }
    }
    void eval_impl(const EipReal& m, const Jet& j, RVec& W, RVec&) const
    {
        const double k = to_double(m.kappa);
        for (std::size_t i = 0; i < j.size(); ++i) {
            const double r = j.rho[i], rc = clamp(r), sx = j.sx[i];
            W[i] = -2 * k * r / (1 + k * r) * sx * sx + 0.5 * k * (j.rxx[i] - j.rx[i] * j.rx[i] / rc);
        }
    }
    void eval_impl(const Entropic& m, const Jet& j, RVec& W, RVec& J) const
    {
        const detail::LogDeriv ld(m.kappa);
        const detail::CompiledExpr G(m.G);
        const double D = to_double(m.D);
        for (std::size_t i = 0; i < j.size(); ++i) {
            const double rc = clamp(j.rho[i]);
            const double f = rc * ld.g(rc);
            W[i] = -D * f * j.sxx[i] + (m.G.is_zero() ? 0.0 : G(rc));
            J[i] = -D * f * j.rx[i];
        }
    }
    void eval_impl(const EntropicReal& m, const Jet& j, RVec& W, RVec&) const
    {
        const detail::LogDeriv ld(m.kappa);
        const detail::CompiledExpr G(m.G);
        const double D = to_double(m.D);
        for (std::size_t i = 0; i < j.size(); ++i) {
            const double rc = clamp(j.rho[i]);
            const double g = ld.g(rc);
            const double f1 = rc * g * g;
            const double f2 = 0.5 * (g * g + 2 * rc * g * ld.gprime(rc));
            W[i] = -0.5 * D * D * (f1 * j.rxx[i] + f2 * j.rx[i] * j.rx[i]) + (m.G.is_zero() ? 0.0 : G(rc));
        }
    }
    void eval_impl(const FiveFunction& m, const Jet& j, RVec& W, RVec& J) const
    {
        const detail::CompiledExpr f1(m.f[0]), f2(m.f[1]), f3(m.f[2]), f4(m.f[3]), f5(m.f[4]);
        for (std::size_t i = 0; i < j.size(); ++i) {
            const double rc = clamp(j.rho[i]), rx = j.rx[i];
            W[i] = f1(rc) * j.sxx[i] + f2(rc) * rx * j.sx[i] + f3(rc) * rx * rx + f4(rc) * j.rxx[i];
            J[i] = 2 * f5(rc) * rx;
        }
    }
    void eval_impl(const GaugedAnomalous& m, const Jet& j, RVec& W, RVec& J) const
    {
        const double q = to_double(m.q), D = to_double(m.D), a = to_double(m.alpha);
        for (std::size_t i = 0; i < j.size(); ++i) {
            const double rc = clamp(j.rho[i]), rx = j.rx[i];
            const double pq = std::pow(rc, q - 1);
            const double p2 = pq * pq;  // rho^{2q-2}
            W[i] = q * D * pq * j.sxx[i] + 2 * a * p2 / rc * j.rxx[i] + a * (2 * q - 3) * p2 / (rc * rc) * rx * rx;
            J[i] = D * q * pq * rx;
        }
    }
    void eval_impl(const AnomalousReal& m, const Jet& j, RVec& W, RVec&) const
    {
        const double q = to_double(m.q), b = to_double(m.beta);
        for (std::size_t i = 0; i < j.size(); ++i) {
            const double rc = clamp(j.rho[i]), lx = j.rx[i] / rc;
            W[i] = b * std::pow(rc, 2 * q - 2) * (j.rxx[i] / rc + (q - 1.5) * lx * lx);
        }
    }
};

inline bool is_real_family(const ModelSpec& m)
{
    return std::visit(
        [](const auto& v) -> bool {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Dnls>)
                return v.b4 == 0;
            else if constexpr (std::is_same_v<T, DoebnerGoldin>)
                return v.D == 0;
            else if constexpr (std::is_same_v<T, Eip>)
                return v.kappa == 0;
            else if constexpr (std::is_same_v<T, Entropic>)
                return v.D == 0;
            else if constexpr (std::is_same_v<T, FiveFunction>)
                return v.f[4].is_zero();
            else if constexpr (std::is_same_v<T, GaugedAnomalous>)
                return v.D == 0;
            else
                return true;
        },
        m);
}

inline RVec current_functional(const ModelSpec& model, const HydroField& h, double floor = default_floor,
                               std::span<const double> A = {})
{
    RVec W, J;
    PointwiseModel{model, floor}.eval(jet_from_hydro(h, A), W, J);
    return J;
}

// W from the jet, calW = div(J) / (2 rho) with the same discrete derivative; zero where rho <= floor
inline NonlinearityEval eval_nonlinearity(const ModelSpec& model, const HydroField& h, double floor = default_floor,
                                          std::span<const double> A = {})
{
    NonlinearityEval out;
    RVec J;
    PointwiseModel{model, floor}.eval(jet_from_hydro(h, A), out.W, J);
    RVec dJ = derivative(J, h.grid);
    out.calW.assign(h.rho.size(), 0.0);
    for (std::size_t i = 0; i < h.rho.size(); ++i) {
        if (h.rho[i] > floor) {
            out.calW[i] = dJ[i] / (2 * h.rho[i]);
        } else {
            out.W[i] = 0.0;
        }
    }
    return out;
}

struct NotRepresentable {
    std::string reason;
};

// kappa = c rho^p  ->  p
inline std::optional<Rational> monomial_power(const RhoExpr& kappa)
{
    auto ts = kappa.terms();
    if (ts.size() == 1 && ts[0].m == 0 && ts[0].coeff > 0)
        return ts[0].p;
    return std::nullopt;
}

inline std::variant<FiveFunction, NotRepresentable> to_five_function(const ModelSpec& model)
{
    using R = std::variant<FiveFunction, NotRepresentable>;
    return std::visit(
        [](const auto& m) -> R {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, FiveFunction>) {
                return m;
            } else if constexpr (std::is_same_v<T, DoebnerGoldin>) {
                if (m.c[2] != 0)
                    return NotRepresentable{"c3 (grad S)^2 term lies outside the five-function family"};
                return FiveFunction{{RhoExpr::constant(m.c[0]), RhoExpr::term(m.c[0] + m.c[3], -1),
                                     RhoExpr::term(m.c[4], -2), RhoExpr::term(m.c[1], -1),
                                     RhoExpr::constant(m.D / 2)}};
            } else if constexpr (std::is_same_v<T, Dnls>) {
                if (m.b1 == 0 && m.b2 == 0 && m.b3 == 0 && m.b4 == 0)
                    return FiveFunction{};
                return NotRepresentable{"rho S_x term, potential terms b1 rho, b2 rho^2 and rho^2 current lie outside "
                                        "the five-function family"};
            } else if constexpr (std::is_same_v<T, Eip> || std::is_same_v<T, EipReal>) {
                if (m.kappa == 0)
                    return FiveFunction{};
                return NotRepresentable{"(grad S)^2 term lies outside the five-function family"};
            } else if constexpr (std::is_same_v<T, Entropic> || std::is_same_v<T, EntropicReal>) {
                if (!m.G.is_zero())
                    return NotRepresentable{"potential term G(rho) lies outside the five-function family"};
                auto p = monomial_power(m.kappa);
                if (!p)
                    return NotRepresentable{"f(rho) = rho (ln kappa)' is not a finite rho-expression"};
                FiveFunction ff;
                if constexpr (std::is_same_v<T, Entropic>) {
                    ff.f[0] = RhoExpr::constant(-m.D * *p);
                    ff.f[4] = RhoExpr::constant(-m.D * *p / 2);
                } else {
                    const Rational k = m.D * m.D * *p * *p;
                    ff.f[2] = RhoExpr::term(k / 4, -2);
                    ff.f[3] = RhoExpr::term(-k / 2, -1);
                }
                return ff;
            } else if constexpr (std::is_same_v<T, GaugedAnomalous>) {
                FiveFunction ff;
                ff.f[0] = RhoExpr::term(m.q * m.D, m.q - 1);
                ff.f[2] = RhoExpr::term(m.alpha * (2 * m.q - 3), 2 * m.q - 4);
                ff.f[3] = RhoExpr::term(2 * m.alpha, 2 * m.q - 3);
                ff.f[4] = RhoExpr::term(m.D * m.q / 2, m.q - 1);
                return ff;
            } else {
                static_assert(std::is_same_v<T, AnomalousReal>);
                FiveFunction ff;
                ff.f[2] = RhoExpr::term(m.beta * (m.q - Rational(3, 2)), 2 * m.q - 4);
                ff.f[3] = RhoExpr::term(m.beta, 2 * m.q - 3);
                return ff;
            }
        },
        model);
}

} // namespace mg
