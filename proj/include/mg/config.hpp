#pragma once

#include "mg/coupled.hpp"
#include "mg/errors.hpp"
#include "mg/fieldgrid.hpp"
#include "mg/gauged.hpp"
#include "mg/models.hpp"
#include "mg/rational.hpp"
#include "mg/rhoexpr.hpp"
#include "mg/solver.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace mg {

// scalar text or a bracketed list of values
struct ConfigValue {
    std::string scalar;
    std::vector<ConfigValue> items;
    bool is_list = false;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return std::string(s.substr(a, b - a));
}

inline ConfigValue parse_value(std::string_view s, std::size_t& pos, const std::string& key)
{
    auto skip = [&] {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
    };
    skip();
    ConfigValue v;
    if (pos < s.size() && s[pos] == '[') {
        v.is_list = true;
        ++pos;
        skip();
        if (pos < s.size() && s[pos] == ']') {
            ++pos;
            return v;
        }
        while (true) {
            v.items.push_back(parse_value(s, pos, key));
            skip();
            if (pos >= s.size())
                throw Error(ErrorKind::ConfigError, "unterminated list for key '" + key + "'");
            if (s[pos] == ',') {
                ++pos;
                continue;
            }
            if (s[pos] == ']') {
                ++pos;
                break;
            }
            throw Error(ErrorKind::ConfigError, "unexpected '" + std::string(1, s[pos]) + "' in key '" + key + "'");
        }
        return v;
    }
    const std::size_t start = pos;
    while (pos < s.size() && s[pos] != ',' && s[pos] != ']' && s[pos] != '[')
        ++pos;
    v.scalar = trim(s.substr(start, pos - start));
    if (v.scalar.empty())
        throw Error(ErrorKind::ConfigError, "empty value for key '" + key + "'");
    return v;
}

inline std::string to_text(const ConfigValue& v)
{
    if (!v.is_list)
        return v.scalar;
    std::string out = "[";
    for (std::size_t i = 0; i < v.items.size(); ++i)
        out += (i ? ", " : "") + to_text(v.items[i]);
    return out + "]";
}

} // namespace detail

class RunConfig {
public:
    static RunConfig parse(const std::string& text)
    {
        RunConfig c;
        c.text_ = text;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            const std::string t = detail::trim(line);
            if (t.empty())
                continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
            const std::string key = detail::trim(std::string_view(t).substr(0, eq));
            const std::string raw = detail::trim(std::string_view(t).substr(eq + 1));
            if (key.empty())
                throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": empty key");
            if (c.values_.count(key))
                throw Error(ErrorKind::ConfigError, "duplicate key '" + key + "'");
            std::size_t pos = 0;
            ConfigValue v = detail::parse_value(raw, pos, key);
            if (detail::trim(std::string_view(raw).substr(pos)).size())
                throw Error(ErrorKind::ConfigError, "trailing text after value of '" + key + "'");
            c.values_[key] = v;
            c.order_.push_back(key);
        }
        return c;
    }

    static RunConfig load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorKind::ConfigError, "cannot open config " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    const std::string& text() const { return text_; }
    bool has(const std::string& k) const { return values_.count(k) != 0; }
    const std::vector<std::string>& keys() const { return order_; }

    // the keys that start with prefix, with the prefix removed
    RunConfig with_prefix(const std::string& prefix) const
    {
        std::string text;
        for (const auto& k : order_)
            if (k.size() > prefix.size() && k.compare(0, prefix.size(), prefix) == 0)
                text += k.substr(prefix.size()) + " = " + detail::to_text(values_.at(k)) + "\n";
        return parse(text);
    }

    void reject_unknown(const std::set<std::string>& allowed) const
    {
        for (const auto& k : order_)
            if (!allowed.count(k))
                throw Error(ErrorKind::ConfigError, "unknown key '" + k + "'");
    }

    const ConfigValue& value(const std::string& k) const
    {
        auto it = values_.find(k);
        if (it == values_.end())
            throw Error(ErrorKind::ConfigError, "missing key '" + k + "'");
        return it->second;
    }

    std::string str(const std::string& k) const { return scalar(k); }
    std::string str(const std::string& k, const std::string& def) const { return has(k) ? scalar(k) : def; }

    Rational rational(const std::string& k) const { return as_rational(scalar(k), k); }
    Rational rational(const std::string& k, const Rational& def) const { return has(k) ? rational(k) : def; }

    double real(const std::string& k) const { return as_real(scalar(k), k); }
    double real(const std::string& k, double def) const { return has(k) ? real(k) : def; }

    long integer(const std::string& k) const
    {
        const std::string s = scalar(k);
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(s, &used);
        } catch (...) {
            used = 0;
        }
        if (used != s.size())
            throw Error(ErrorKind::ConfigError, "key '" + k + "' expects an integer, got '" + s + "'");
        return v;
    }
    long integer(const std::string& k, long def) const { return has(k) ? integer(k) : def; }

    bool boolean(const std::string& k, bool def) const
    {
        if (!has(k))
            return def;
        const std::string s = scalar(k);
        if (s == "true" || s == "1")
            return true;
        if (s == "false" || s == "0")
            return false;
        throw Error(ErrorKind::ConfigError, "key '" + k + "' expects true or false");
    }

    std::vector<Rational> rational_list(const std::string& k) const
    {
        const ConfigValue& v = value(k);
        if (!v.is_list)
            throw Error(ErrorKind::ConfigError, "key '" + k + "' expects a list");
        std::vector<Rational> out;
        for (const auto& it : v.items) {
            if (it.is_list)
                throw Error(ErrorKind::ConfigError, "key '" + k + "' expects a flat list");
            out.push_back(as_rational(it.scalar, k));
        }
        return out;
    }

    RMat rational_matrix(const std::string& k, int rows, int cols) const
    {
        const ConfigValue& v = value(k);
        if (!v.is_list || static_cast<int>(v.items.size()) != rows)
            throw Error(ErrorKind::ConfigError, "key '" + k + "' expects " + std::to_string(rows) + " rows");
        RMat m;
        for (const auto& row : v.items) {
            if (!row.is_list || static_cast<int>(row.items.size()) != cols)
                throw Error(ErrorKind::ConfigError, "key '" + k + "' expects rows of length " + std::to_string(cols));
            std::vector<Rational> r;
            for (const auto& e : row.items)
                r.push_back(as_rational(e.scalar, k));
            m.push_back(std::move(r));
        }
        return m;
    }

    std::vector<std::vector<Rational>> rational_rows(const std::string& k) const
    {
        const ConfigValue& v = value(k);
        if (!v.is_list)
            throw Error(ErrorKind::ConfigError, "key '" + k + "' expects a list of lists");
        std::vector<std::vector<Rational>> out;
        for (const auto& row : v.items) {
            if (!row.is_list)
                throw Error(ErrorKind::ConfigError, "key '" + k + "' expects a list of lists");
            std::vector<Rational> r;
            for (const auto& e : row.items) {
                if (e.is_list)
                    throw Error(ErrorKind::ConfigError, "key '" + k + "' nests too deeply");
                r.push_back(as_rational(e.scalar, k));
            }
            out.push_back(std::move(r));
        }
        return out;
    }

    // [[coeff, power, log_power], ...]
    RhoExpr rho_expr(const std::string& k) const
    {
        RhoExpr e;
        for (const auto& row : rational_rows(k)) {
            if (row.size() < 2 || row.size() > 3)
                throw Error(ErrorKind::ConfigError, "key '" + k + "' terms are [coeff, power] or [coeff, power, log_power]");
            int m = 0;
            if (row.size() == 3) {
                if (denominator(row[2]) != 1 || row[2] < 0)
                    throw Error(ErrorKind::ConfigError, "key '" + k + "' log power must be a non-negative integer");
                m = static_cast<int>(numerator(row[2]));
            }
            e += RhoExpr::term(row[0], row[1], m);
        }
        return e;
    }
    RhoExpr rho_expr(const std::string& k, const RhoExpr& def) const { return has(k) ? rho_expr(k) : def; }

private:
    std::string scalar(const std::string& k) const
    {
        const ConfigValue& v = value(k);
        if (v.is_list)
            throw Error(ErrorKind::ConfigError, "key '" + k + "' expects a scalar");
        return v.scalar;
    }

    static Rational as_rational(const std::string& s, const std::string& k)
    {
        try {
            return parse_rational(s);
        } catch (const Error&) {
            throw Error(ErrorKind::ConfigError, "key '" + k + "' expects a rational, got '" + s + "'");
        }
    }

    static double as_real(const std::string& s, const std::string& k)
    {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (...) {
            used = 0;
        }
        if (used != s.size()) {
            if (s.find('/') != std::string::npos)
                return to_double(as_rational(s, k));
            throw Error(ErrorKind::ConfigError, "key '" + k + "' expects a number, got '" + s + "'");
        }
        return v;
    }

    static BigInt numerator(const Rational& r) { return boost::multiprecision::numerator(r); }
    static BigInt denominator(const Rational& r) { return boost::multiprecision::denominator(r); }

    std::map<std::string, ConfigValue> values_;
    std::vector<std::string> order_;
    std::string text_;
};

// keys shared by every model description
inline const std::set<std::string>& model_keys()
{
    static const std::set<std::string> k{"family", "b1", "b2", "b3", "b4", "a1", "a2", "a3", "a4", "c", "D",
                                         "c5",     "kappa", "G", "f1", "f2", "f3", "f4", "f5", "q", "alpha",
                                         "beta"};
    return k;
}

inline const std::set<std::string>& family_names()
{
    static const std::set<std::string> f{"dnls",      "doebner-goldin", "eip",      "entropic",     "five-function",
                                         "gauged-anomalous", "eip-real", "entropic-real", "anomalous-real"};
    return f;
}

inline ModelSpec model_from_config(const RunConfig& c)
{
    const std::string fam = c.str("family");
    if (fam == "dnls") {
        if (c.has("a1") || c.has("a2") || c.has("a3") || c.has("a4"))
            return Dnls::from_wave(c.rational("a1", 0), c.rational("a2", 0), c.rational("a3", 0), c.rational("a4", 0));
        return Dnls{c.rational("b1", 0), c.rational("b2", 0), c.rational("b3", 0), c.rational("b4", 0)};
    }
    if (fam == "doebner-goldin") {
        if (!c.has("c"))
            return DoebnerGoldin::canonical_model(c.rational("D"), c.rational("c5", 0));
        auto v = c.rational_list("c");
        if (v.size() != 5)
            throw Error(ErrorKind::ConfigError, "key 'c' expects five coefficients");
        return DoebnerGoldin{{v[0], v[1], v[2], v[3], v[4]}, c.rational("D", 0)};
    }
    if (fam == "eip")
        return Eip{c.rational("kappa")};
    if (fam == "eip-real")
        return EipReal{c.rational("kappa")};
    if (fam == "entropic" || fam == "entropic-real") {
        const RhoExpr kappa = c.rho_expr("kappa");
        if (kappa.is_zero())
            throw Error(ErrorKind::ConfigError, "kappa must be nonzero");
        if (fam == "entropic")
            return Entropic{kappa, c.rational("D"), c.rho_expr("G", RhoExpr{})};
        return EntropicReal{kappa, c.rational("D"), c.rho_expr("G", RhoExpr{})};
    }
    if (fam == "five-function") {
        FiveFunction f;
        for (int k = 0; k < 5; ++k)
            f.f[k] = c.rho_expr("f" + std::to_string(k + 1), RhoExpr{});
        return f;
    }
    if (fam == "gauged-anomalous")
        return GaugedAnomalous{c.rational("q"), c.rational("D"), c.rational("alpha", 0)};
    if (fam == "anomalous-real")
        return AnomalousReal{c.rational("q"), c.rational("beta")};
    throw Error(ErrorKind::ConfigError, "unknown family '" + fam + "'");
}

inline FiveFunction five_from_config(const RunConfig& c, const std::string& prefix)
{
    FiveFunction f;
    for (int k = 0; k < 5; ++k)
        f.f[k] = c.rho_expr(prefix + std::to_string(k + 1), RhoExpr{});
    return f;
}

inline const std::set<std::string>& grid_keys()
{
    static const std::set<std::string> k{"x_min", "x_max", "n", "boundary", "initial", "width", "wavenumber",
                                         "amplitude", "center"};
    return k;
}

inline const std::set<std::string>& solver_keys()
{
    static const std::set<std::string> k{"scheme", "dt", "t_end", "snapshot_every", "floor", "fd_order",
                                         "max_corrector", "corrector_tol"};
    return k;
}

inline Grid1D grid_from_config(const RunConfig& c)
{
    const std::string bc = c.str("boundary", "dirichlet");
    if (bc != "dirichlet" && bc != "periodic")
        throw Error(ErrorKind::ConfigError, "boundary must be dirichlet or periodic");
    try {
        return Grid1D(c.real("x_min", -20), c.real("x_max", 20), static_cast<int>(c.integer("n", 512)),
                      bc == "periodic" ? Boundary::Periodic : Boundary::Dirichlet);
    } catch (const Error& e) {
        throw Error(ErrorKind::ConfigError, e.message());
    }
}

inline ComplexField initial_from_config(const RunConfig& c, const Grid1D& g)
{
    const std::string kind = c.str("initial", "gaussian");
    const double w = c.real("width", 1.0), k = c.real("wavenumber", 0.0), a = c.real("amplitude", 1.0),
                 x0 = c.real("center", 0.0);
    if (!(w > 0))
        throw Error(ErrorKind::ConfigError, "width must be positive");
    if (kind == "gaussian")
        return make_field(g, [&](double x) {
            const double y = (x - x0) / w;
            return a * std::exp(-y * y / 2) * std::polar(1.0, k * x);
        });
    if (kind == "sech")
        return make_field(g, [&](double x) { return a / std::cosh((x - x0) / w) * std::polar(1.0, k * x); });
    if (kind == "plane")
        return make_field(g, [&](double x) { return a * std::polar(1.0, k * x); });
    throw Error(ErrorKind::ConfigError, "initial must be gaussian, sech or plane");
}

inline SolverConfig solver_from_config(const RunConfig& c, std::optional<double> floor_override = std::nullopt)
{
    SolverConfig s;
    const std::string sc = c.str("scheme", "crank-nicolson");
    if (sc == "crank-nicolson")
        s.scheme = Scheme::CrankNicolsonFD;
    else if (sc == "rk4-spectral")
        s.scheme = Scheme::RK4Spectral;
    else
        throw Error(ErrorKind::ConfigError, "scheme must be crank-nicolson or rk4-spectral");
    s.dt = c.real("dt", s.dt);
    s.t_end = c.real("t_end", s.t_end);
    s.snapshot_every = static_cast<int>(c.integer("snapshot_every", s.snapshot_every));
    s.floor = c.real("floor", s.floor);
    s.fd_order = static_cast<int>(c.integer("fd_order", s.fd_order));
    s.max_corrector = static_cast<int>(c.integer("max_corrector", s.max_corrector));
    s.corrector_tol = c.real("corrector_tol", s.corrector_tol);
    if (floor_override)
        s.floor = *floor_override;
    if (!(s.dt > 0) || !(s.t_end > 0) || s.snapshot_every < 1 || !(s.floor > 0) || s.max_corrector < 1)
        throw Error(ErrorKind::ConfigError, "solver settings out of range");
    return s;
}

inline const std::set<std::string>& coupled_keys()
{
    static const std::set<std::string> k{"p", "multiplets", "a", "b", "c", "d", "e", "alpha", "beta", "gamma",
                                         "epsilon", "potential"};
    return k;
}

// matrices b, c, d, e directly or the wave-form alpha, beta, gamma, epsilon;
// potential = [[j, i, k, coeff], ...] with 1-based indices
inline CoupledModel coupled_from_config(const RunConfig& c)
{
    const int p = static_cast<int>(c.integer("p"));
    if (p < 1)
        throw Error(ErrorKind::ConfigError, "p must be >= 1");
    const auto a = c.rational_list("a");
    if (static_cast<int>(a.size()) != p)
        throw Error(ErrorKind::ConfigError, "key 'a' expects p entries");
    auto mat = [&](const std::string& k) { return c.has(k) ? c.rational_matrix(k, p, p) : zero_mat(p); };
    CoupledModel m;
    if (c.has("alpha") || c.has("beta") || c.has("gamma") || c.has("epsilon")) {
        if (c.has("b") || c.has("c") || c.has("d") || c.has("e"))
            throw Error(ErrorKind::ConfigError, "give either b, c, d, e or alpha, beta, gamma, epsilon");
        m = CoupledModel::from_wave(a, mat("alpha"), mat("beta"), mat("gamma"), mat("epsilon"));
    } else {
        m.p = p;
        m.a = a;
        m.b = mat("b");
        m.c = mat("c");
        m.d = mat("d");
        m.e = mat("e");
        m.lam.assign(p, zero_mat(p));
        for (int j = 0; j < p; ++j)
            m.multiplets.push_back({j});
    }
    if (c.has("multiplets")) {
        m.multiplets.clear();
        for (const auto& g : c.rational_rows("multiplets")) {
            std::vector<int> grp;
            for (const auto& v : g) {
                if (boost::multiprecision::denominator(v) != 1)
                    throw Error(ErrorKind::ConfigError, "multiplet indices must be integers");
                grp.push_back(static_cast<int>(boost::multiprecision::numerator(v)) - 1);
            }
            m.multiplets.push_back(grp);
        }
    }
    if (c.has("potential"))
        for (const auto& row : c.rational_rows("potential")) {
            if (row.size() != 4)
                throw Error(ErrorKind::ConfigError, "potential rows are [j, i, k, coeff]");
            int idx[3];
            for (int t = 0; t < 3; ++t) {
                if (boost::multiprecision::denominator(row[t]) != 1)
                    throw Error(ErrorKind::ConfigError, "potential indices must be integers");
                idx[t] = static_cast<int>(boost::multiprecision::numerator(row[t])) - 1;
                if (idx[t] < 0 || idx[t] >= p)
                    throw Error(ErrorKind::ConfigError, "potential index out of range");
            }
            m.lam[idx[0]][idx[1]][idx[2]] += row[3];
        }
    try {
        m.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::ConfigError, e.message());
    }
    return m;
}

} // namespace mg
