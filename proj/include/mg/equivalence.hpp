#pragma once

#include "mg/errors.hpp"
#include "mg/models.hpp"
#include "mg/rhoexpr.hpp"

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <variant>

namespace mg {

using FiveVector = FiveFunction;

// push-forward of the five functions under phi = exp(i omega(rho)) psi
inline FiveVector push_forward(const FiveVector& v, const RhoExpr& omega)
{
    const auto& [f1, f2, f3, f4, f5] = v.f;
    const RhoExpr w1 = omega.deriv();
    const RhoExpr w2 = w1.deriv();
    const RhoExpr rw1 = w1.times_rho_pow(1);
    const RhoExpr g1 = f1 - Rational(2) * rw1;
    FiveVector out;
    out.f[0] = g1;
    out.f[1] = f2;
    out.f[2] = f3 - f2 * w1 + w1 * w1 - Rational(2) * (f5.deriv() * w1) - g1 * w2;
    out.f[3] = f4 - (f1 + Rational(2) * f5 - Rational(2) * rw1) * w1;
    out.f[4] = f5 - rw1;
    return out;
}

struct NotEquivalent {
    int relation;  // 1..4, see witness text
    std::string witness;
};

// omega with push_forward(f, omega) == g, constant term fixed to zero
inline std::variant<RhoExpr, NotEquivalent> equivalence_generator(const FiveVector& f, const FiveVector& g)
{
    const RhoExpr omega = (f.f[4] - g.f[4]).div_rho().integral().without_constant();
    const FiveVector h = push_forward(f, omega);
    if (g.f[1] != f.f[1])
        return NotEquivalent{2, "f2~ = f2 violated: " + g.f[1].str() + " != " + f.f[1].str()};
    if (g.f[0] != h.f[0])
        return NotEquivalent{1, "f1~ - f1 = 2 (f5~ - f5) violated"};
    if (g.f[2] != h.f[2])
        return NotEquivalent{3, "f3~ - f3 relation violated: expected " + h.f[2].str() + ", got " + g.f[2].str()};
    if (g.f[3] != h.f[3])
        return NotEquivalent{4, "f4~ - f4 = (f1 + 2 f5~)(f5~ - f5)/rho violated: expected " + h.f[3].str() +
                                    ", got " + g.f[3].str()};
    return omega;
}

struct NotLinearizable {
    int condition;
    std::string witness;
};

// omega = int f5/rho with push_forward(f, omega) = 0 when the four conditions hold
inline std::variant<RhoExpr, NotLinearizable> linearizable(const FiveVector& v)
{
    const auto& [f1, f2, f3, f4, f5] = v.f;
    const RhoExpr q = f5.div_rho();
    if (f1 != Rational(2) * f5)
        return NotLinearizable{1, "f1 = 2 f5 violated"};
    if (!f2.is_zero())
        return NotLinearizable{2, "f2 = 0 violated"};
    if (f3 != q * (Rational(2) * f5.deriv() - q))
        return NotLinearizable{3, "f3 = (f5/rho)(2 f5' - f5/rho) violated"};
    if (f4 != Rational(2) * f5 * q)
        return NotLinearizable{4, f5.is_zero() ? "f4 = 2 f5^2/rho violated (f5 = 0 forces f4 = 0)"
                                               : "f4 = 2 f5^2/rho violated"};
    return q.integral().without_constant();
}

struct LinearizationMap {
    Rational D;
    Rational kbar_sq;                 // 1 - D^2, exact
    std::optional<Rational> kbar_exact;
    double kbar = 1.0;
};

inline std::optional<Rational> exact_sqrt(const Rational& r)
{
    if (r < 0)
        return std::nullopt;
    const BigInt n = boost::multiprecision::numerator(r), d = boost::multiprecision::denominator(r);
    const BigInt sn = boost::multiprecision::sqrt(n), sd = boost::multiprecision::sqrt(d);
    if (sn * sn == n && sd * sd == d)
        return Rational(sn, sd);
    return std::nullopt;
}

inline LinearizationMap guerra_map(const Rational& D)
{
    if (D < 0 || D >= 1)
        throw Error(ErrorKind::DomainError, "linearization requires 0 <= D < 1, got " + D.str());
    LinearizationMap m;
    m.D = D;
    m.kbar_sq = 1 - D * D;
    m.kbar_exact = exact_sqrt(m.kbar_sq);
    m.kbar = std::sqrt(to_double(m.kbar_sq));
    return m;
}

// chi = sqrt(rho) exp(i S / kbar)
inline ComplexField to_linear_field(const HydroField& h, const LinearizationMap& m)
{
    ComplexField c{CVec(h.rho.size()), h.grid};
    for (std::size_t i = 0; i < h.rho.size(); ++i)
        c.values[i] = std::polar(std::sqrt(h.rho[i]), h.phase[i] / m.kbar);
    return c;
}

inline HydroField from_linear_field(const ComplexField& chi, const LinearizationMap& m, double floor = default_floor)
{
    HydroField h = to_hydro(chi, floor);
    for (double& s : h.phase)
        s *= m.kbar;
    return h;
}

} // namespace mg
