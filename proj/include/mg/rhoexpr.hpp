#pragma once

#include "mg/errors.hpp"
#include "mg/rational.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace mg {

// Finite sums  sum_k c_k rho^{p_k} (ln rho)^{m_k}  with rational c_k, p_k and m_k >= 0.
class RhoExpr {
public:
    struct Key {
        Rational p;
        int m = 0;
        bool operator<(const Key& o) const { return p < o.p || (p == o.p && m < o.m); }
        bool operator==(const Key& o) const { return p == o.p && m == o.m; }
    };
    struct Term {
        Rational coeff;
        Rational p;
        int m = 0;
    };

    RhoExpr() = default;

    static RhoExpr constant(const Rational& c) { return term(c, 0, 0); }
    static RhoExpr term(const Rational& c, const Rational& p, int m = 0)
    {
        RhoExpr e;
        e.add_term(c, p, m);
        return e;
    }
    static RhoExpr rho(const Rational& c = 1) { return term(c, 1, 0); }
    static RhoExpr log_rho(const Rational& c = 1) { return term(c, 0, 1); }

    static RhoExpr from_terms(const std::vector<Term>& ts)
    {
        RhoExpr e;
        for (const auto& t : ts)
            e.add_term(t.coeff, t.p, t.m);
        return e;
    }

    std::vector<Term> terms() const
    {
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (const auto& [k, c] : terms_)
            out.push_back({c, k.p, k.m});
        return out;
    }

    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    Rational coeff(const Rational& p, int m = 0) const
    {
        auto it = terms_.find(Key{p, m});
        return it == terms_.end() ? Rational(0) : it->second;
    }

    // constant term (p = 0, m = 0)
    Rational constant_term() const { return coeff(0, 0); }
    RhoExpr without_constant() const
    {
        RhoExpr e = *this;
        e.terms_.erase(Key{Rational(0), 0});
        return e;
    }

    RhoExpr& operator+=(const RhoExpr& o)
    {
        for (const auto& [k, c] : o.terms_)
            add_term(c, k.p, k.m);
        return *this;
    }
    RhoExpr& operator-=(const RhoExpr& o)
    {
        for (const auto& [k, c] : o.terms_)
            add_term(-c, k.p, k.m);
        return *this;
    }
    RhoExpr& operator*=(const Rational& s)
    {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, c] : terms_)
            c *= s;
        return *this;
    }

    friend RhoExpr operator+(RhoExpr a, const RhoExpr& b) { return a += b; }
    friend RhoExpr operator-(RhoExpr a, const RhoExpr& b) { return a -= b; }
    friend RhoExpr operator-(RhoExpr a)
    {
        a *= Rational(-1);
        return a;
    }
    friend RhoExpr operator*(RhoExpr a, const Rational& s) { return a *= s; }
    friend RhoExpr operator*(const Rational& s, RhoExpr a) { return a *= s; }
    friend RhoExpr operator*(const RhoExpr& a, const RhoExpr& b)
    {
        RhoExpr r;
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_)
                r.add_term(ca * cb, ka.p + kb.p, ka.m + kb.m);
        return r;
    }
    friend bool operator==(const RhoExpr& a, const RhoExpr& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const RhoExpr& a, const RhoExpr& b) { return !(a == b); }

    // multiply by rho^q
    RhoExpr times_rho_pow(const Rational& q) const
    {
        RhoExpr r;
        for (const auto& [k, c] : terms_)
            r.add_term(c, k.p + q, k.m);
        return r;
    }
    RhoExpr div_rho() const { return times_rho_pow(-1); }

    // d/drho (rho^p ln^m) = p rho^{p-1} ln^m + m rho^{p-1} ln^{m-1}
    RhoExpr deriv() const
    {
        RhoExpr r;
        for (const auto& [k, c] : terms_) {
            if (k.p != 0)
                r.add_term(c * k.p, k.p - 1, k.m);
            if (k.m > 0)
                r.add_term(c * k.m, k.p - 1, k.m - 1);
        }
        return r;
    }

    // antiderivative with zero constant term; the algebra is closed under it
    RhoExpr integral() const
    {
        RhoExpr r;
        for (const auto& [k, c] : terms_)
            integrate_term(r, c, k.p, k.m);
        return r;
    }

    bool needs_positive() const
    {
        for (const auto& [k, c] : terms_) {
            if (k.m > 0 || k.p < 0 || denominator(k.p) != 1)
                return true;
        }
        return false;
    }

    double eval(double rho) const
    {
        double s = 0.0;
        if (rho <= 0.0 && needs_positive())
            throw Error(ErrorKind::DomainError, "rho-expression " + str() + " evaluated at rho <= 0");
        const double lr = rho > 0.0 ? std::log(rho) : 0.0;
        for (const auto& [k, c] : terms_) {
            double v = to_double(c);
            if (k.p != 0) {
                if (denominator(k.p) == 1 && rho <= 0.0)
                    v *= std::pow(rho, to_double(k.p));
                else
                    v *= std::exp(to_double(k.p) * lr);
            }
            for (int i = 0; i < k.m; ++i)
                v *= lr;
            s += v;
        }
        return s;
    }

    std::string str() const
    {
        if (terms_.empty())
            return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [k, c] : terms_) {
            if (!first)
                os << " + ";
            first = false;
            os << "(" << c.str() << ")";
            if (k.p != 0)
                os << "*rho^(" << k.p.str() << ")";
            if (k.m == 1)
                os << "*ln(rho)";
            else if (k.m > 1)
                os << "*ln(rho)^" << k.m;
        }
        return os.str();
    }

private:
    static BigInt denominator(const Rational& r) { return boost::multiprecision::denominator(r); }

    void add_term(const Rational& c, const Rational& p, int m)
    {
        if (c == 0)
            return;
        Key k{p, m};
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(k, c);
        } else {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        }
    }

    static void integrate_term(RhoExpr& out, const Rational& c, const Rational& p, int m)
    {
        if (p == -1) {
            out.add_term(c / (m + 1), 0, m + 1);
            return;
        }
        // integration by parts: I(p,m) = rho^{p+1} ln^m/(p+1) - m/(p+1) I(p,m-1)
        const Rational q = p + 1;
        out.add_term(c / q, q, m);
        if (m > 0)
            integrate_term(out, -c * m / q, p, m - 1);
    }

    std::map<Key, Rational> terms_;
};

} // namespace mg
