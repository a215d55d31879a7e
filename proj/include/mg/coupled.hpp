#pragma once

#include "mg/errors.hpp"
#include "mg/fieldgrid.hpp"
#include "mg/gauge.hpp"
#include "mg/rational.hpp"

#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace mg {

using RMat = std::vector<std::vector<Rational>>;

inline RMat zero_mat(int p) { return RMat(p, std::vector<Rational>(p, Rational(0))); }

struct CoupledModel {
    int p = 0;
    std::vector<std::vector<int>> multiplets;  // 0-based indices
    std::vector<Rational> a;
    RMat b, c, d, e;
    // f_j = sum_{i,k} lam[j][i][k] rho_i rho_k
    std::vector<RMat> lam;

    static CoupledModel from_wave(const std::vector<Rational>& a, const RMat& alpha, const RMat& beta,
                                  const RMat& gamma, const RMat& eps)
    {
        const int p = static_cast<int>(a.size());
        CoupledModel m;
        m.p = p;
        m.a = a;
        m.b = m.c = m.d = m.e = zero_mat(p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                m.b[i][j] = alpha[i][j] - beta[i][j];
                m.c[i][j] = gamma[i][j] - eps[i][j];
                m.d[i][j] = (alpha[i][j] + beta[i][j]) / 2;
                m.e[i][j] = (gamma[i][j] + eps[i][j]) / 2;
            }
        m.lam.assign(p, zero_mat(p));
        m.multiplets.clear();
        for (int j = 0; j < p; ++j)
            m.multiplets.push_back({j});
        return m;
    }

    void validate() const
    {
        if (p < 1 || static_cast<int>(a.size()) != p)
            throw Error(ErrorKind::ConfigError, "coupled model needs p >= 1 and p diffusion coefficients");
        for (const auto* M : {&b, &c, &d, &e})
            if (static_cast<int>(M->size()) != p)
                throw Error(ErrorKind::ConfigError, "coefficient matrices must be p x p");
        for (const auto& x : a)
            if (x == 0)
                throw Error(ErrorKind::ConfigError, "a_j must be nonzero");
        std::vector<int> seen(p, 0);
        for (const auto& g : multiplets)
            for (int k : g) {
                if (k < 0 || k >= p || seen[k]++)
                    throw Error(ErrorKind::ConfigError, "multiplets must partition the components");
            }
        for (int k : seen)
            if (k != 1)
                throw Error(ErrorKind::ConfigError, "multiplets must cover every component");
    }

    Rational lambda(int i, int j) const { return d[i][j] + e[i][j]; }
};

enum class Conservation { PerSpecies, TotalOnly, Custom, NonConserving };

struct ConservationStructure {
    Conservation kind;
    int wi = -1, wj = -1;  // witness pair (1-based) when NonConserving
    std::string text() const
    {
        switch (kind) {
        case Conservation::PerSpecies: return "PerSpecies";
        case Conservation::TotalOnly: return "TotalOnly";
        case Conservation::Custom: return "Custom";
        case Conservation::NonConserving:
            return "NonConserving (" + std::to_string(wi) + "," + std::to_string(wj) + ")";
        }
        return "?";
    }
};

inline ConservationStructure conservation_structure(const CoupledModel& m)
{
    bool per = true;
    for (int i = 0; i < m.p && per; ++i)
        for (int j = 0; j < m.p; ++j)
            if (i != j && m.d[i][j] != m.e[i][j]) {
                per = false;
                break;
            }
    if (per)
        return {Conservation::PerSpecies};
    // within a multiplet structure the total condition is applied to every pair
    for (int i = 0; i < m.p; ++i)
        for (int j = 0; j < m.p; ++j)
            if (m.d[i][j] + m.e[j][i] != m.d[j][i] + m.e[i][j])
                return {Conservation::NonConserving, i + 1, j + 1};
    if (m.multiplets.size() == 1 || static_cast<int>(m.multiplets.size()) == m.p)
        return {Conservation::TotalOnly};
    return {Conservation::Custom};
}

// sigma_j = -(1/(2 a_j)) sum_i lambda_ij int rho_i
struct CoupledGenerator {
    std::vector<Rational> weights;  // coefficient of int rho_i
};

inline std::vector<CoupledGenerator> coupled_generators(const CoupledModel& m)
{
    m.validate();
    const auto cs = conservation_structure(m);
    if (cs.kind == Conservation::NonConserving)
        throw Error(ErrorKind::NonConservingModel, "no conserved multiplet structure, witness " + cs.text());
    std::vector<CoupledGenerator> gens(m.p);
    for (int j = 0; j < m.p; ++j) {
        gens[j].weights.resize(m.p);
        for (int i = 0; i < m.p; ++i)
            gens[j].weights[i] = -m.lambda(i, j) / (2 * m.a[j]);
    }
    return gens;
}

struct HermitianResult {
    RMat mu, nu;
    std::vector<RMat> omega;  // omega[j][i][k]
    RMat F;                   // d - e, coefficients of the antisymmetric functionals
    bool offdiag_empty = true;
    std::vector<CoupledGenerator> generators;
    std::string normalization = "2 sqrt(rho_l rho_m)";
    std::string phase_convention = "transformed phases";
};

inline HermitianResult transform_coupled(const CoupledModel& m)
{
    HermitianResult r;
    r.generators = coupled_generators(m);
    const int p = m.p;
    r.mu = r.nu = r.F = zero_mat(p);
    r.omega.assign(p, zero_mat(p));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            const Rational lij = m.lambda(i, j);
            r.mu[i][j] = m.b[i][j] + lij;
            r.nu[i][j] = m.c[i][j] - m.a[i] / m.a[j] * lij;
            r.F[i][j] = m.d[i][j] - m.e[i][j];
        }
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < p; ++i)
            for (int k = 0; k < p; ++k)
                r.omega[j][i][k] = (m.lambda(i, j) * m.lambda(k, j) + 2 * m.b[i][j] * m.lambda(k, j) +
                                    2 * m.a[j] / m.a[i] * m.c[i][j] * m.lambda(k, i)) /
                                   (4 * m.a[j]);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (i != j && r.F[i][j] != 0)
                r.offdiag_empty = false;
    return r;
}

// F_j = sum_i (d_ij - e_ij)(rho_i rho_j' - rho_i' rho_j), pointwise
inline std::vector<RVec> assemble_F(const HermitianResult& r, const std::vector<RVec>& rho, const Grid1D& g)
{
    const int p = static_cast<int>(rho.size());
    std::vector<RVec> drho(p);
    for (int i = 0; i < p; ++i)
        drho[i] = derivative(rho[i], g);
    std::vector<RVec> F(p, RVec(g.n, 0.0));
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < p; ++i) {
            const double c = to_double(r.F[i][j]);
            if (c == 0.0)
                continue;
            for (int x = 0; x < g.n; ++x)
                F[j][x] += c * (rho[i][x] * drho[j][x] - drho[i][x] * rho[j][x]);
        }
    return F;
}

// C_lm = i (F_l - F_m) / (2 sqrt(rho_l rho_m)) exp(i (S_l - S_m)) at grid point x
inline std::vector<std::vector<cplx>> assemble_C(const std::vector<RVec>& F, const std::vector<RVec>& rho,
                                                 const std::vector<RVec>& phase, int x)
{
    const int p = static_cast<int>(F.size());
    std::vector<std::vector<cplx>> C(p, std::vector<cplx>(p, 0.0));
    for (int l = 0; l < p; ++l)
        for (int mm = 0; mm < p; ++mm) {
            if (l == mm)
                continue;
            const double den = 2 * std::sqrt(rho[l][x] * rho[mm][x]);
            C[l][mm] = cplx(0, 1) * (F[l][x] - F[mm][x]) / den * std::polar(1.0, phase[l][x] - phase[mm][x]);
        }
    return C;
}

struct DecoupledLinear {};
struct JackiwLike {
    std::vector<Rational> eta;
};
struct CurrentCoupled {
    RMat eta;
};
struct GeneralReduction {
    std::string note;
};
using Reduction = std::variant<DecoupledLinear, JackiwLike, CurrentCoupled, GeneralReduction>;

inline Reduction special_reduction(const CoupledModel& m)
{
    const int p = m.p;
    bool b_all = true, b_off = true, c_cond = true;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            const Rational l = m.lambda(i, j);
            if (m.b[i][j] != -l) {
                b_all = false;
                if (i != j)
                    b_off = false;
            }
            if (m.a[j] * m.c[i][j] != 2 * m.a[i] * l)
                c_cond = false;
        }
    if (b_all && c_cond) {
        // f_j must carry lam_jik = b_ij (b_kj - 2 b_ki) / (4 a_j), compared on symmetric parts
        bool match = true;
        for (int j = 0; j < p && match; ++j)
            for (int i = 0; i < p && match; ++i)
                for (int k = i; k < p; ++k) {
                    auto want = [&](int ii, int kk) {
                        return m.b[ii][j] * (m.b[kk][j] - 2 * m.b[kk][ii]) / (4 * m.a[j]);
                    };
                    const Rational w = want(i, k) + (i == k ? Rational(0) : want(k, i));
                    const Rational h = m.lam[j][i][k] + (i == k ? Rational(0) : m.lam[j][k][i]);
                    if (w != h) {
                        match = false;
                        break;
                    }
                }
        if (match)
            return DecoupledLinear{};
        return GeneralReduction{"coefficients of the decoupled regime, but f_j does not cancel the rho rho terms"};
    }
    if (b_off && c_cond) {
        JackiwLike r;
        for (int j = 0; j < p; ++j)
            r.eta.push_back((m.b[j][j] + m.lambda(j, j)) / (2 * m.a[j]));
        return r;
    }
    if (b_all) {
        CurrentCoupled r{zero_mat(p)};
        for (int j = 0; j < p; ++j)
            for (int k = 0; k < p; ++k)
                r.eta[j][k] = (m.c[j][k] - m.a[k] * m.lambda(j, k) / m.a[j]) / (2 * m.a[k]);
        return r;
    }
    return GeneralReduction{"no special regime"};
}

inline std::string reduction_name(const Reduction& r)
{
    static const char* names[] = {"DecoupledLinear", "JackiwLike", "CurrentCoupled", "General"};
    return names[r.index()];
}

} // namespace mg
