#pragma once

#include "mg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace mg {

using cplx = std::complex<double>;
using RVec = std::vector<double>;
using CVec = std::vector<cplx>;

inline constexpr double default_floor = 1e-12;

enum class Boundary { Periodic, Dirichlet };

struct Grid1D {
    double x_min = 0.0;
    double x_max = 1.0;
    int n = 8;
    Boundary boundary = Boundary::Dirichlet;

    Grid1D() = default;
    Grid1D(double a, double b, int npts, Boundary bc) : x_min(a), x_max(b), n(npts), boundary(bc)
    {
        if (!(x_max > x_min))
            throw Error(ErrorKind::DomainError, "grid requires x_max > x_min");
        if (n < 8)
            throw Error(ErrorKind::DomainError, "grid requires n >= 8");
    }

    double h() const { return boundary == Boundary::Periodic ? (x_max - x_min) / n : (x_max - x_min) / (n - 1); }
    double x(int i) const { return x_min + i * h(); }
    RVec coords() const
    {
        RVec xs(n);
        for (int i = 0; i < n; ++i)
            xs[i] = x(i);
        return xs;
    }
    bool periodic() const { return boundary == Boundary::Periodic; }
    bool operator==(const Grid1D&) const = default;
};

struct ComplexField {
    CVec values;
    Grid1D grid;
};

struct HydroField {
    RVec rho;
    RVec phase;
    Grid1D grid;
    int held_points = 0;  // nodes where the phase was copied from a neighbour
};

// second-order central difference; one-sided second-order rows at Dirichlet ends
inline RVec derivative(std::span<const double> f, const Grid1D& g)
{
    const int n = static_cast<int>(f.size());
    const double h = g.h();
    RVec d(n);
    if (g.periodic()) {
        for (int i = 0; i < n; ++i)
            d[i] = (f[(i + 1) % n] - f[(i - 1 + n) % n]) / (2 * h);
        return d;
    }
    for (int i = 1; i < n - 1; ++i)
        d[i] = (f[i + 1] - f[i - 1]) / (2 * h);
    d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
    d[n - 1] = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h);
    return d;
}

// the Laplacian is the square of the derivative, so div(grad) identities survive discretisation
inline RVec laplacian(std::span<const double> f, const Grid1D& g)
{
    RVec d = derivative(f, g);
    return derivative(d, g);
}

// Right-inverse of derivative(): F[0] = 0, the first one-sided row and every interior row
// are reproduced exactly. The last row cannot be (derivative() annihilates constants).
inline RVec cumulative_integral(std::span<const double> f, const Grid1D& g)
{
    const int n = static_cast<int>(f.size());
    const double h = g.h();
    RVec F(n, 0.0);
    if (n < 2)
        return F;
    F[1] = 0.5 * h * (f[0] + f[1]);
    for (int i = 1; i < n - 1; ++i)
        F[i + 1] = F[i - 1] + 2 * h * f[i];
    return F;
}

inline double trapezoid(std::span<const double> f, const Grid1D& g)
{
    double s = 0.0;
    const int n = static_cast<int>(f.size());
    if (g.periodic()) {
        for (double v : f)
            s += v;
        return s * g.h();
    }
    for (int i = 0; i < n; ++i)
        s += (i == 0 || i == n - 1) ? 0.5 * f[i] : f[i];
    return s * g.h();
}

inline double wrap_pi(double a)
{
    constexpr double two_pi = 2 * std::numbers::pi;
    a = std::remainder(a, two_pi);
    return a;
}

inline HydroField to_hydro(const ComplexField& psi, double floor = default_floor)
{
    if (!(floor > 0))
        throw Error(ErrorKind::DomainError, "floor must be positive");
    const auto& v = psi.values;
    const int n = static_cast<int>(v.size());
    HydroField hf{RVec(n), RVec(n), psi.grid, 0};
    int anchor = -1;
    for (int i = 0; i < n; ++i) {
        hf.rho[i] = std::norm(v[i]);
        if (anchor < 0 && hf.rho[i] > floor)
            anchor = i;
    }
    if (anchor < 0)
        throw Error(ErrorKind::AllBelowFloor, "density below floor everywhere; phase undefined");
    hf.phase[anchor] = std::arg(v[anchor]);
    int last_valid = anchor;
    for (int i = anchor + 1; i < n; ++i) {
        if (hf.rho[i] > floor) {
            hf.phase[i] = hf.phase[last_valid] + wrap_pi(std::arg(v[i]) - std::arg(v[last_valid]));
            last_valid = i;
        } else {
            hf.phase[i] = hf.phase[last_valid];
            ++hf.held_points;
        }
    }
    for (int i = 0; i < anchor; ++i) {
        hf.phase[i] = hf.phase[anchor];
        ++hf.held_points;
    }
    return hf;
}

inline ComplexField from_hydro(const HydroField& h)
{
    ComplexField out{CVec(h.rho.size()), h.grid};
    for (std::size_t i = 0; i < h.rho.size(); ++i)
        out.values[i] = std::polar(std::sqrt(std::max(h.rho[i], 0.0)), h.phase[i]);
    return out;
}

inline RVec quantum_potential(const HydroField& h, double floor = default_floor)
{
    const std::size_t n = h.rho.size();
    RVec a(n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = std::sqrt(std::max(h.rho[i], 0.0));
        any = any || h.rho[i] > floor;
    }
    if (!any)
        throw Error(ErrorKind::AllBelowFloor, "density below floor everywhere");
    RVec lap = laplacian(a, h.grid);
    RVec uq(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (h.rho[i] > floor)
            uq[i] = -lap[i] / a[i];
    return uq;
}

// phase gradient; on periodic grids the seam difference is taken modulo 2 pi
inline RVec phase_derivative(const HydroField& h)
{
    if (!h.grid.periodic())
        return derivative(h.phase, h.grid);
    const int n = static_cast<int>(h.phase.size());
    RVec d(n);
    for (int i = 0; i < n; ++i)
        d[i] = wrap_pi(h.phase[(i + 1) % n] - h.phase[(i - 1 + n) % n]) / (2 * h.grid.h());
    return d;
}

inline RVec bilinear_current(const HydroField& h)
{
    RVec sx = phase_derivative(h);
    for (std::size_t i = 0; i < sx.size(); ++i)
        sx[i] *= 2 * h.rho[i];
    return sx;
}

inline ComplexField make_field(const Grid1D& g, auto&& fn)
{
    ComplexField f{CVec(g.n), g};
    for (int i = 0; i < g.n; ++i)
        f.values[i] = fn(g.x(i));
    return f;
}

inline HydroField make_hydro(const Grid1D& g, auto&& rho_fn, auto&& phase_fn)
{
    HydroField h{RVec(g.n), RVec(g.n), g, 0};
    for (int i = 0; i < g.n; ++i) {
        h.rho[i] = rho_fn(g.x(i));
        h.phase[i] = phase_fn(g.x(i));
    }
    return h;
}

inline void write_csv(const ComplexField& psi, const std::string& path, double floor = default_floor)
{
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp)
        throw Error(ErrorKind::ConfigError, "cannot write " + path);
    HydroField h;
    bool have_phase = true;
    try {
        h = to_hydro(psi, floor);
    } catch (const Error&) {
        have_phase = false;
    }
    std::fprintf(fp, "x,rho,S,re_psi,im_psi\n");
    for (int i = 0; i < psi.grid.n; ++i) {
        const cplx v = psi.values[i];
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g\n", psi.grid.x(i), std::norm(v),
                     have_phase ? h.phase[i] : 0.0, v.real(), v.imag());
    }
    std::fclose(fp);
}

} // namespace mg
