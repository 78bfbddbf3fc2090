#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cctype>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>

#include "dnbody/errors.hpp"

namespace dnbody {

/// Exact rational scalar. Arbitrary precision so products of random test
/// couplings never overflow.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Exact value of cos(2*pi*num/den) when it is rational, i.e. when the reduced
/// denominator divides 1, 2, 3, 4 or 6 (Niven's theorem). Empty otherwise.
inline std::optional<Rational> rational_cos_two_pi(BigInt num, BigInt den) {
    if (den < 0) { den = -den; num = -num; }
    BigInt g = gcd(abs(num), den);
    if (g != 0) { num /= g; den /= g; }
    num %= den;
    if (num < 0) num += den;
    // reduced fraction num/den in [0,1)
    const std::int64_t d = den.convert_to<std::int64_t>();
    const std::int64_t k = num.convert_to<std::int64_t>();
    switch (d) {
    case 1: return Rational(1);
    case 2: return Rational(-1);
    case 3: return Rational(-1, 2);
    case 4: return Rational(0);
    case 6: return (k == 1 || k == 5) ? Rational(1, 2) : Rational(-1, 2);
    default: return std::nullopt;
    }
}

/// Parse "p/q", "p", or a decimal ("-0.25", "1e-3", "2.5e2") exactly.
/// Decimals become the exact fraction they denote.
inline Rational parse_rational(const std::string& text) {
    std::string s = text;
    // strip surrounding whitespace
    size_t a = s.find_first_not_of(" \t");
    size_t b = s.find_last_not_of(" \t");
    if (a == std::string::npos) throw Error("empty number");
    s = s.substr(a, b - a + 1);

    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const std::string ns = s.substr(0, slash), ds = s.substr(slash + 1);
        if (ns.empty() || ds.empty()) throw Error("malformed rational '" + text + "'");
        BigInt num(ns), den(ds);
        if (den == 0) throw Error("zero denominator in '" + text + "'");
        return Rational(num, den);
    }

    // decimal / integer, optional exponent
    bool neg = false;
    size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) { neg = (s[i] == '-'); ++i; }
    BigInt mant = 0;
    long frac_digits = 0;
    bool any_digit = false, in_frac = false;
    long exp10 = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mant = mant * 10 + (c - '0');
            if (in_frac) ++frac_digits;
            any_digit = true;
        } else if (c == '.' && !in_frac) {
            in_frac = true;
        } else if ((c == 'e' || c == 'E') && any_digit) {
            exp10 = std::stol(s.substr(i + 1));
            break;
        } else {
            throw Error("malformed number '" + text + "'");
        }
    }
    if (!any_digit) throw Error("malformed number '" + text + "'");
    Rational r(mant, 1);
    long net = exp10 - frac_digits;
    if (net > 0) r *= Rational(pow(BigInt(10), static_cast<unsigned>(net)), 1);
    if (net < 0) r /= Rational(pow(BigInt(10), static_cast<unsigned>(-net)), 1);
    return neg ? -r : r;
}

/// "p/q" (or plain integer when the denominator is 1).
inline std::string format_rational(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << '/' << denominator(r);
    return os.str();
}

} // namespace dnbody
