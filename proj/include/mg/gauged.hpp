#pragma once

#include "mg/errors.hpp"
#include "mg/fieldgrid.hpp"
#include "mg/gauge.hpp"
#include "mg/models.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace mg {

struct ExternalGauge {
    RVec A;
    RVec A0;
    Grid1D grid;
};

// sign s in j0 = 2 rho (S_x + s A); +1 corresponds to D = d + i A
inline constexpr int default_sign = +1;

enum class Side { Matter, Field };

struct GaugedTransformResult {
    GeneratorSpec sigma;
    Rational beta;
    Side side = Side::Matter;
    int sign = default_sign;
};

inline ExternalGauge load_external_gauge(const std::string& path, const Grid1D& grid)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::ConfigError, "cannot open " + path);
    std::string line;
    std::getline(in, line);
    ExternalGauge g{{}, {}, grid};
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double x, a, a0;
        if (!(ss >> x >> a >> a0))
            throw Error(ErrorKind::ConfigError, "bad row in " + path + ": " + line);
        g.A.push_back(a);
        g.A0.push_back(a0);
    }
    if (static_cast<int>(g.A.size()) != grid.n)
        throw Error(ErrorKind::ConfigError, "external gauge has " + std::to_string(g.A.size()) +
                                                " rows, grid has " + std::to_string(grid.n));
    return g;
}

inline void check_anomalous_domain(const GaugedAnomalous& m, const HydroField& h)
{
    if (m.q < 1)
        for (double r : h.rho)
            if (r <= 0)
                throw Error(ErrorKind::DomainError, "rho <= 0 with q < 1");
}

inline RVec scaled_A(const ExternalGauge& ext, int sign)
{
    RVec a = ext.A;
    for (double& v : a)
        v *= sign;
    return a;
}

inline RVec covariant_current(const GaugedAnomalous& m, const HydroField& h, const ExternalGauge& ext,
                              int sign = default_sign, double floor = default_floor)
{
    check_anomalous_domain(m, h);
    const RVec sx = phase_derivative(h);
    const RVec J = current_functional(m, h, floor);
    RVec j(h.rho.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        j[i] = 2 * h.rho[i] * (sx[i] + sign * ext.A[i]) + J[i];
    return j;
}

inline GaugedTransformResult matter_transform(const GaugedAnomalous& m)
{
    if (m.D < 0 || m.q <= 0)
        throw Error(ErrorKind::DomainError, "matter transform requires D >= 0 and q > 0");
    return {LocalGen{anomalous_sigma(m.q, m.D)}, 2 * m.alpha - m.q * m.q * m.D * m.D / 2, Side::Matter,
            default_sign};
}

struct FieldTransform {
    RVec chi;
    RVec chi0;
    int sign = default_sign;
};

// chi = A + s grad sigma keeps the covariant current unchanged (s = -1 gives chi = A - grad sigma);
// chi0 = A0 + d sigma/dt with d sigma/dt = sigma'(rho) (-div j_A)
inline FieldTransform field_transform(const GaugedAnomalous& m, const HydroField& h, const ExternalGauge& ext,
                                      int sign = default_sign, double floor = default_floor)
{
    check_anomalous_domain(m, h);
    const RVec sigma = evaluate_generator(LocalGen{anomalous_sigma(m.q, m.D)}, h, floor);
    const RVec ds = derivative(sigma, h.grid);
    const RVec jA = covariant_current(m, h, ext, sign, floor);
    const RVec div = derivative(jA, h.grid);
    const RhoExpr s1 = anomalous_sigma(m.q, m.D).deriv();
    FieldTransform ft{RVec(h.rho.size()), RVec(h.rho.size()), sign};
    for (std::size_t i = 0; i < h.rho.size(); ++i) {
        ft.chi[i] = ext.A[i] + sign * ds[i];
        const double sp = s1.is_zero() ? 0.0 : s1.eval(clamp_floor(h.rho[i], floor));
        ft.chi0[i] = ext.A0[i] + sp * (-div[i]);
    }
    return ft;
}

// 2 rho (grad S + s a) for a real (already transformed) model
inline RVec minimal_current(const HydroField& h, std::span<const double> a, int sign = default_sign)
{
    RVec j = phase_derivative(h);
    for (std::size_t i = 0; i < j.size(); ++i)
        j[i] = 2 * h.rho[i] * (j[i] + sign * a[i]);
    return j;
}

// max |sigma_q'(rho) - D/(2 rho)| at q = 1 + eps
inline double q_limit_consistency(double D, const std::vector<double>& rho_samples, double eps)
{
    double dev = 0.0;
    const double q = 1.0 + eps;
    for (double r : rho_samples) {
        if (!(r > 0))
            throw Error(ErrorKind::DomainError, "samples must be positive");
        const double dq = 0.5 * D * q * std::pow(r, q - 2);
        dev = std::max(dev, std::abs(dq - 0.5 * D / r));
    }
    return dev;
}

} // namespace mg
