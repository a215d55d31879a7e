#pragma once

#include "mg/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace mg {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational parse_rational(std::string_view text)
{
    std::string s(text);
    auto trim = [](std::string& t) {
        auto a = t.find_first_not_of(" \t");
        auto b = t.find_last_not_of(" \t");
        t = (a == std::string::npos) ? std::string() : t.substr(a, b - a + 1);
    };
    trim(s);
    if (s.empty())
        throw Error(ErrorKind::DomainError, "empty rational");
    // decimal literals such as "0.4" are accepted and converted exactly
    if (auto dot = s.find('.'); dot != std::string::npos && s.find('/') == std::string::npos) {
        bool neg = s[0] == '-';
        std::string body = (neg || s[0] == '+') ? s.substr(1) : s;
        dot = body.find('.');
        std::string ip = body.substr(0, dot), fp = body.substr(dot + 1);
        if ((ip + fp).empty() || (ip + fp).find_first_not_of("0123456789") != std::string::npos)
            throw Error(ErrorKind::DomainError, "bad rational: " + s);
        BigInt num(ip.empty() ? std::string("0") : ip);
        BigInt den = 1;
        for (char c : fp) {
            num = num * 10 + (c - '0');
            den *= 10;
        }
        Rational r(num, den);
        return neg ? Rational(-r) : r;
    }
    try {
        return Rational(s);
    } catch (const std::exception&) {
        throw Error(ErrorKind::DomainError, "bad rational: " + s);
    }
}

inline std::string to_string(const Rational& r)
{
    return r.str();
}

inline double to_double(const Rational& r)
{
    return r.convert_to<double>();
}

} // namespace mg
