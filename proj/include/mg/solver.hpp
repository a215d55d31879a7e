#pragma once

#include "mg/errors.hpp"
#include "mg/fieldgrid.hpp"
#include "mg/models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <fftw3.h>
#include <lapacke.h>

namespace mg {

// the nonlinearity divides by max(rho, floor); below the floor it decays continuously with rho
inline constexpr double solver_floor = 1e-16;

enum class Scheme { CrankNicolsonFD, RK4Spectral };

struct SolverConfig {
    Scheme scheme = Scheme::CrankNicolsonFD;
    double dt = 1e-3;
    double t_end = 1.0;
    int snapshot_every = 100;
    double floor = solver_floor;
    int fd_order = 6;             // 2, 4 or 6, CrankNicolsonFD only
    int max_corrector = 60;       // midpoint fixed-point iterations per step
    double corrector_tol = 1e-14; // relative sup-norm change that ends the iteration
    double diffusion = 1.0;       // a in  i psi_t + a psi_xx + N psi = 0
};

struct Diagnostics {
    double t = 0.0;
    double N = 0.0;
    double continuity_residual = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ComplexField> states;
    std::vector<Diagnostics> diagnostics;
    int max_corrector_used = 0;
};

namespace detail {

inline std::mutex& fftw_mutex()
{
    static std::mutex m;
    return m;
}

// owns one in-place complex transform pair of a fixed size
class FftPair {
public:
    explicit FftPair(int n) : n_(n)
    {
        std::lock_guard lk(fftw_mutex());
        buf_ = fftw_alloc_complex(n);
        fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPair()
    {
        std::lock_guard lk(fftw_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    FftPair(const FftPair&) = delete;
    FftPair& operator=(const FftPair&) = delete;

    cplx* data() { return reinterpret_cast<cplx*>(buf_); }
    void forward() { fftw_execute(fwd_); }
    void backward() { fftw_execute(bwd_); }
    int size() const { return n_; }

private:
    int n_;
    fftw_complex* buf_;
    fftw_plan fwd_, bwd_;
};

// real sine transform (type I) on the interior points of a Dirichlet grid
class SineTransform {
public:
    explicit SineTransform(int m) : m_(m)
    {
        std::lock_guard lk(fftw_mutex());
        buf_ = fftw_alloc_real(m);
        plan_ = fftw_plan_r2r_1d(m, buf_, buf_, FFTW_RODFT00, FFTW_ESTIMATE);
    }
    ~SineTransform()
    {
        std::lock_guard lk(fftw_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(buf_);
    }
    SineTransform(const SineTransform&) = delete;
    SineTransform& operator=(const SineTransform&) = delete;

    double* data() { return buf_; }
    void execute() { fftw_execute(plan_); }

private:
    int m_;
    double* buf_;
    fftw_plan plan_;
};

} // namespace detail

// spatial operators used by the integrator: finite differences with zero ghost values
// (Dirichlet-decaying) or Fourier multipliers (periodic)
class DiffOps {
public:
    DiffOps(const Grid1D& g, Scheme s, int order) : grid_(g), scheme_(s), order_(order)
    {
        if (s == Scheme::CrankNicolsonFD) {
            if (g.periodic())
                throw Error(ErrorKind::ConfigError, "CrankNicolsonFD requires a Dirichlet-decaying grid");
            if (order != 2 && order != 4 && order != 6)
                throw Error(ErrorKind::ConfigError, "fd_order must be 2, 4 or 6");
        } else {
            if (!g.periodic())
                throw Error(ErrorKind::ConfigError, "RK4Spectral requires a periodic grid");
            fft_ = std::make_unique<detail::FftPair>(g.n);
            k_.resize(g.n);
            const double L = g.x_max - g.x_min;
            for (int i = 0; i < g.n; ++i) {
                const int m = i <= g.n / 2 ? i : i - g.n;
                k_[i] = 2 * std::numbers::pi * m / L;
            }
            if (g.n % 2 == 0)
                nyq_ = g.n / 2;
        }
    }

    const Grid1D& grid() const { return grid_; }
    int order() const { return order_; }
    Scheme scheme() const { return scheme_; }

    template <class T>
    void d1(const std::vector<T>& f, std::vector<T>& out) const
    {
        if (scheme_ == Scheme::RK4Spectral) {
            out.resize(grid_.n);
            spectral(f, out, 1);
            return;
        }
        apply(f, out, stencil1(), 1.0 / grid_.h());
    }

    template <class T>
    void d2(const std::vector<T>& f, std::vector<T>& out) const
    {
        if (scheme_ == Scheme::RK4Spectral) {
            out.resize(grid_.n);
            spectral(f, out, 2);
            return;
        }
        apply(f, out, stencil2(), 1.0);
    }

    // central first-derivative weights (offsets -w..w), to be divided by h
    const std::vector<double>& stencil1() const
    {
        static const std::vector<double> s2{-0.5, 0.0, 0.5};
        static const std::vector<double> s4{1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
        static const std::vector<double> s6{-1.0 / 60, 9.0 / 60, -45.0 / 60, 0.0, 45.0 / 60, -9.0 / 60, 1.0 / 60};
        return order_ == 2 ? s2 : order_ == 4 ? s4 : s6;
    }

    // banded coefficients of the FD Laplacian: offsets -w..w
    std::vector<double> stencil2() const
    {
        static const std::vector<double> s2{1.0, -2.0, 1.0};
        static const std::vector<double> s4{-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
        static const std::vector<double> s6{2.0 / 180,    -27.0 / 180, 270.0 / 180, -490.0 / 180,
                                            270.0 / 180, -27.0 / 180, 2.0 / 180};
        const double h2 = grid_.h() * grid_.h();
        std::vector<double> s = order_ == 2 ? s2 : order_ == 4 ? s4 : s6;
        for (double& v : s)
            v /= h2;
        return s;
    }

private:
    template <class T>
    void apply(const std::vector<T>& f, std::vector<T>& out, const std::vector<double>& st, double scale) const
    {
        const int n = grid_.n;
        const int w = static_cast<int>(st.size()) / 2;
        out.assign(n, T(0));
        for (int i = 0; i < n; ++i) {
            T acc(0);
            if (i >= w && i + w < n) {
                for (int o = -w; o <= w; ++o)
                    acc += st[o + w] * f[i + o];
            } else {
                for (int o = -w; o <= w; ++o)
                    if (i + o >= 0 && i + o < n)
                        acc += st[o + w] * f[i + o];
            }
            out[i] = acc * scale;
        }
    }

    template <class T>
    void spectral(const std::vector<T>& f, std::vector<T>& out, int deriv) const
    {
        std::lock_guard lk(mutex_);
        const int n = grid_.n;
        cplx* b = fft_->data();
        for (int i = 0; i < n; ++i)
            b[i] = cplx(f[i]);
        fft_->forward();
        for (int i = 0; i < n; ++i) {
            const cplx mult = deriv == 1 ? cplx(0, (i == nyq_) ? 0.0 : k_[i]) : cplx(-k_[i] * k_[i], 0);
            b[i] *= mult / double(n);
        }
        fft_->backward();
        for (int i = 0; i < n; ++i) {
            if constexpr (std::is_same_v<T, double>)
                out[i] = b[i].real();
            else
                out[i] = b[i];
        }
    }

    Grid1D grid_;
    Scheme scheme_;
    int order_;
    std::unique_ptr<detail::FftPair> fft_;
    std::vector<double> k_;
    int nyq_ = -1;
    mutable std::mutex mutex_;
};

// N = W + i calW evaluated from psi without phase extraction:
// rho S_x = Im(conj(psi) psi_x), (rho S_x)_x = Im(conj(psi) psi_xx)
class NonlinearTerm {
public:
    NonlinearTerm(const ModelSpec& m, const DiffOps& ops, double floor, double diffusion = 1.0)
        : pm_{m, floor}, ops_(ops), floor_(floor), a_(diffusion), real_(is_real_family(m))
    {
    }

    Jet jet(const CVec& psi) const
    {
        const int n = static_cast<int>(psi.size());
        ops_.d1(psi, px_);
        ops_.d2(psi, pxx_);
        Jet j;
        j.rho.resize(n);
        j.rx.resize(n);
        j.rxx.resize(n);
        j.sx.resize(n);
        j.sxx.resize(n);
        for (int i = 0; i < n; ++i) {
            const cplx c = std::conj(psi[i]);
            const double r = std::norm(psi[i]);
            const double rc = r > floor_ ? r : floor_;
            const cplx a1 = c * px_[i], a2 = c * pxx_[i];
            j.rho[i] = r;
            j.rx[i] = 2 * a1.real();
            j.rxx[i] = 2 * a2.real() + 2 * std::norm(px_[i]);
            j.sx[i] = a1.imag() / rc;
            j.sxx[i] = (a2.imag() - j.rx[i] * j.sx[i]) / rc;
        }
        return j;
    }

    // fills N; returns the pointwise current J as well (for diagnostics)
    void operator()(const CVec& psi, CVec& N, RVec* Jout = nullptr, RVec* j0out = nullptr) const
    {
        const Jet j = jet(psi);
        pm_.eval(j, W_, J_);
        const int n = static_cast<int>(psi.size());
        N.resize(n);
        if (!real_)
            ops_.d1(J_, dJ_);
        for (int i = 0; i < n; ++i) {
            const double calW = real_ ? 0.0 : dJ_[i] / (2 * std::max(j.rho[i], floor_));
            N[i] = cplx(W_[i], calW);
        }
        if (Jout)
            *Jout = J_;
        if (j0out) {
            j0out->resize(n);
            for (int i = 0; i < n; ++i)
                (*j0out)[i] = 2 * a_ * (std::conj(psi[i]) * px_[i]).imag();
        }
    }

private:
    PointwiseModel pm_;
    const DiffOps& ops_;
    double floor_;
    double a_;
    bool real_;
    mutable CVec px_, pxx_;
    mutable RVec W_, J_, dJ_;
};

namespace detail {

inline void check_state(const CVec& psi, double t, double floor)
{
    double mx = 0.0, mr = 0.0;
    for (const auto& v : psi) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error(ErrorKind::BlowUp, "non-finite field at t = " + std::to_string(t));
        mx = std::max(mx, std::abs(v));
        mr = std::max(mr, std::norm(v));
    }
    if (mx > 1e6)
        throw Error(ErrorKind::BlowUp, "sup norm above 1e6 at t = " + std::to_string(t));
    if (!(mr > floor))
        throw Error(ErrorKind::FloorBreach, "density below floor everywhere at t = " + std::to_string(t));
}

inline double sup_diff(const CVec& a, const CVec& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double sup_abs(const CVec& a)
{
    double m = 0.0;
    for (const auto& v : a)
        m = std::max(m, std::abs(v));
    return m;
}

inline double norm_of(const CVec& psi, const Grid1D& g)
{
    RVec r(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i)
        r[i] = std::norm(psi[i]);
    return trapezoid(r, g);
}

} // namespace detail

class Integrator {
public:
    Integrator(const ModelSpec& model, const Grid1D& grid, const SolverConfig& cfg)
        : cfg_(cfg), ops_(grid, cfg.scheme, cfg.fd_order), nl_(model, ops_, cfg.floor, cfg.diffusion)
    {
        if (!(cfg.dt > 0) || !(cfg.t_end > 0) || !std::isfinite(cfg.dt * cfg.t_end))
            throw Error(ErrorKind::ConfigError, "dt and t_end must be positive and finite");
        if (cfg.snapshot_every < 1)
            throw Error(ErrorKind::ConfigError, "snapshot_every must be >= 1");
    }

    Trajectory run(const ComplexField& psi0)
    {
        const Grid1D& g = ops_.grid();
        if (!(psi0.grid == g))
            throw Error(ErrorKind::ConfigError, "initial field grid does not match solver grid");
        const int steps = static_cast<int>(std::llround(cfg_.t_end / cfg_.dt));
        Trajectory tr;
        CVec psi = psi0.values;
        detail::check_state(psi, 0.0, cfg_.floor);
        tr.times.push_back(0.0);
        tr.states.push_back(psi0);
        tr.diagnostics.push_back({0.0, detail::norm_of(psi, g), 0.0});
        for (int s = 1; s <= steps; ++s) {
            const bool snap = (s % cfg_.snapshot_every == 0) || s == steps;
            CVec next = cfg_.scheme == Scheme::CrankNicolsonFD ? cn_step(psi, tr) : rk4_step(psi);
            const double t = s * cfg_.dt;
            detail::check_state(next, t, cfg_.floor);
            if (snap) {
                tr.times.push_back(t);
                tr.states.push_back({next, g});
                tr.diagnostics.push_back({t, detail::norm_of(next, g), continuity_residual(psi, next)});
            }
            psi.swap(next);
        }
        return tr;
    }

    const DiffOps& ops() const { return ops_; }

private:
    // max |(rho^{n+1} - rho^n)/dt + d/dx (j0 + J)| with the current taken at the midpoint state
    double continuity_residual(const CVec& a, const CVec& b) const
    {
        const int n = static_cast<int>(a.size());
        CVec mid(n), N;
        for (int i = 0; i < n; ++i)
            mid[i] = 0.5 * (a[i] + b[i]);
        RVec J, j0, j(n), dj;
        nl_(mid, N, &J, &j0);
        for (int i = 0; i < n; ++i)
            j[i] = j0[i] + J[i];
        ops_.d1(j, dj);
        double r = 0.0;
        for (int i = 0; i < n; ++i)
            r = std::max(r, std::abs((std::norm(b[i]) - std::norm(a[i])) / cfg_.dt + dj[i]));
        return r;
    }

    CVec cn_step(const CVec& psi, Trajectory& tr)
    {
        const int n = static_cast<int>(psi.size());
        const std::vector<double> st = ops_.stencil2();
        const int w = static_cast<int>(st.size()) / 2;
        const int ldab = 3 * w + 1;
        const double a = cfg_.diffusion;
        const cplx ih(0, 0.5 * cfg_.dt);
        CVec lap, rhs_base(n), next = psi, mid(n), N, rhs(n);
        std::vector<lapack_complex_double> ab(static_cast<std::size_t>(ldab) * n);
        std::vector<lapack_int> ipiv(n);
        ops_.d2(psi, lap);
        const double scale = 1.0 + detail::sup_abs(psi);
        int it = 0;
        for (; it < cfg_.max_corrector; ++it) {
            for (int i = 0; i < n; ++i)
                mid[i] = 0.5 * (psi[i] + next[i]);
            nl_(mid, N);
            std::fill(ab.begin(), ab.end(), lapack_complex_double(0, 0));
            // column-major band storage for zgbsv: row index kl + ku + i - j
            for (int j = 0; j < n; ++j)
                for (int o = -w; o <= w; ++o) {
                    const int i = j + o;
                    if (i < 0 || i >= n)
                        continue;
                    cplx v = -ih * a * st[o + w];
                    if (o == 0)
                        v = 1.0 - ih * (a * st[w] + N[i]);
                    ab[static_cast<std::size_t>(j) * ldab + (2 * w + i - j)] = v;
                }
            for (int i = 0; i < n; ++i)
                rhs[i] = psi[i] + ih * (a * lap[i] + N[i] * psi[i]);
            lapack_int info = LAPACKE_zgbsv(LAPACK_COL_MAJOR, n, w, w, 1, ab.data(), ldab, ipiv.data(),
                                            rhs.data(), n);
            if (info != 0)
                throw Error(ErrorKind::BlowUp, "banded solve failed (info " + std::to_string(info) + ")");
            const double d = detail::sup_diff(rhs, next);
            next.swap(rhs);
            if (d <= cfg_.corrector_tol * scale)
                break;
        }
        tr.max_corrector_used = std::max(tr.max_corrector_used, it + 1);
        return next;
    }

    CVec rk4_step(const CVec& psi) const
    {
        const int n = static_cast<int>(psi.size());
        const double a = cfg_.diffusion, dt = cfg_.dt;
        auto f = [&](const CVec& u) {
            CVec lap, N, out(n);
            ops_.d2(u, lap);
            nl_(u, N);
            for (int i = 0; i < n; ++i)
                out[i] = cplx(0, 1) * (a * lap[i] + N[i] * u[i]);
            return out;
        };
        auto axpy = [&](const CVec& x, const CVec& k, double c) {
            CVec y(n);
            for (int i = 0; i < n; ++i)
                y[i] = x[i] + c * k[i];
            return y;
        };
        const CVec k1 = f(psi);
        const CVec k2 = f(axpy(psi, k1, dt / 2));
        const CVec k3 = f(axpy(psi, k2, dt / 2));
        const CVec k4 = f(axpy(psi, k3, dt));
        CVec out(n);
        for (int i = 0; i < n; ++i)
            out[i] = psi[i] + dt / 6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        return out;
    }

    SolverConfig cfg_;
    DiffOps ops_;
    NonlinearTerm nl_;
};

inline Trajectory integrate(const ModelSpec& model, const ComplexField& psi0, const SolverConfig& cfg)
{
    Integrator in(model, psi0.grid, cfg);
    return in.run(psi0);
}

// exact propagation of i chi_t + c chi_xx = 0 with chi = 0 at both ends of a Dirichlet grid,
// using the sine basis on the interior nodes
inline ComplexField propagate_linear_dirichlet(const ComplexField& chi0, double coeff, double t)
{
    const Grid1D& g = chi0.grid;
    if (g.periodic())
        throw Error(ErrorKind::ConfigError, "sine propagation needs a Dirichlet grid");
    const int m = g.n - 2;
    const double L = g.x_max - g.x_min;
    detail::SineTransform st(m);
    ComplexField out{CVec(g.n, 0.0), g};
    std::vector<double> re(m), im(m);
    for (int part = 0; part < 2; ++part) {
        for (int i = 0; i < m; ++i)
            st.data()[i] = part == 0 ? chi0.values[i + 1].real() : chi0.values[i + 1].imag();
        st.execute();
        for (int i = 0; i < m; ++i)
            (part == 0 ? re : im)[i] = st.data()[i];
    }
    std::vector<cplx> coef(m);
    for (int j = 0; j < m; ++j) {
        const double k = (j + 1) * std::numbers::pi / L;
        coef[j] = cplx(re[j], im[j]) * std::polar(1.0, -coeff * k * k * t) / (2.0 * (m + 1));
    }
    for (int part = 0; part < 2; ++part) {
        for (int j = 0; j < m; ++j)
            st.data()[j] = part == 0 ? coef[j].real() : coef[j].imag();
        st.execute();
        for (int i = 0; i < m; ++i) {
            if (part == 0)
                out.values[i + 1] += st.data()[i];
            else
                out.values[i + 1] += cplx(0, st.data()[i]);
        }
    }
    return out;
}

} // namespace mg
