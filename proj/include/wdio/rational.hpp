// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <string>

#include "wdio/errors.hpp"

namespace wdio {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int int_pow(Int base, unsigned long e) {
    Int r = 1;
    while (e) {
        if (e & 1) r *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return r;
}

inline Rat rat_pow(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    Int n = int_pow(numerator(base), static_cast<unsigned long>(e < 0 ? -e : e));
    Int d = int_pow(denominator(base), static_cast<unsigned long>(e < 0 ? -e : e));
    return e > 0 ? Rat(n, d) : Rat(d, n);
}

/// a mod b with result in [0, b); requires b > 0.
inline Int mod_floor(const Int& a, const Int& b) {
    Int r = a % b;
    if (r < 0) r += b;
    return r;
}

/// floor(a / b); requires b > 0.
inline Int div_floor(const Int& a, const Int& b) {
    Int q = a / b;
    if ((a % b) != 0 && a < 0) --q;
    return q;
}

/// ceil(a / b); requires b > 0.
inline Int div_ceil(const Int& a, const Int& b) {
    Int q = a / b;
    if ((a % b) != 0 && a > 0) ++q;
    return q;
}

inline Int floor_rat(const Rat& v) { return div_floor(numerator(v), denominator(v)); }

/// Nearest integer to num/den (den > 0), ties broken downward.
inline Int round_nearest_tie_down(const Int& num, const Int& den) {
    // ceil(v - 1/2) = ceil((2 num - den) / (2 den))
    return div_ceil(2 * num - den, 2 * den);
}

inline Int round_nearest_tie_down(const Rat& v) {
    return round_nearest_tie_down(numerator(v), denominator(v));
}

/// floor(a^(1/n)) for a >= 0, n >= 1 (integer Newton iteration).
inline Int nth_root_floor(const Int& a, unsigned n) {
    if (a < 0) throw internal_error("nth_root_floor of negative value");
    if (n == 0) throw internal_error("0th root");
    if (a == 0 || a == 1 || n == 1) return a;
    if (n == 2) return boost::multiprecision::sqrt(a);
    const unsigned long bits = static_cast<unsigned long>(boost::multiprecision::msb(a)) + 1;
    Int x = Int(1) << ((bits + n - 1) / n + 1); // certainly >= root
    for (;;) {
        Int xp = int_pow(x, n - 1);
        Int y = ((n - 1) * x + a / xp) / n;
        if (y >= x) break;
        x = y;
    }
    while (int_pow(x, n) > a) --x;
    while (int_pow(x + 1, n) <= a) ++x;
    return x;
}

inline std::int64_t to_i64(const Int& v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
        throw internal_error("integer out of int64 range: " + v.str());
    return static_cast<std::int64_t>(v);
}

/// Natural log of a positive big integer, accurate to ~1e-14 relative.
inline double log_int(const Int& a) {
    if (a <= 0) throw internal_error("log_int of non-positive value");
    const unsigned long b = static_cast<unsigned long>(boost::multiprecision::msb(a));
    if (b <= 62) return std::log(static_cast<double>(to_i64(a)));
    Int top = a >> (b - 62);
    return std::log(static_cast<double>(to_i64(top))) + static_cast<double>(b - 62) * std::log(2.0);
}

inline double log_rat(const Rat& v) {
    if (v <= 0) throw internal_error("log_rat of non-positive value");
    return log_int(numerator(v)) - log_int(denominator(v));
}

inline double to_double(const Rat& v) { return v.convert_to<double>(); }

/// Decimal string with `digits` significant digits (value truncated toward zero),
/// in scientific form "d.ddd...e+dd". Deterministic across runs and platforms.
inline std::string decimal_string(const Rat& v, unsigned digits = 30) {
    if (digits == 0) digits = 1;
    if (v == 0) return "0";
    Int num = numerator(v), den = denominator(v);
    bool neg = num < 0;
    if (neg) num = -num;
    // decimal exponent: largest e with 10^e <= num/den
    long long e = static_cast<long long>(std::floor((log_int(num) - log_int(den)) / std::log(10.0)));
    // correct possible off-by-one from the floating estimate
    auto cmp_pow10 = [&](long long k) {
        // compare num/den vs 10^k
        if (k >= 0) return num.compare(den * int_pow(10, static_cast<unsigned long>(k)));
        return (num * int_pow(10, static_cast<unsigned long>(-k))).compare(den);
    };
    while (cmp_pow10(e) < 0) --e;
    while (cmp_pow10(e + 1) >= 0) ++e;
    // mantissa digits: floor(num/den * 10^(digits-1-e))
    long long shift = static_cast<long long>(digits) - 1 - e;
    Int mant = shift >= 0 ? (num * int_pow(10, static_cast<unsigned long>(shift))) / den
                          : num / (den * int_pow(10, static_cast<unsigned long>(-shift)));
    std::string m = mant.str();
    while (m.size() < digits) m = "0" + m; // defensive; should not trigger
    std::string out = (neg ? "-" : "");
    out += m.substr(0, 1);
    if (digits > 1) out += "." + m.substr(1, digits - 1);
    out += "e" + std::string(e < 0 ? "-" : "+") + (std::llabs(e) < 10 ? "0" : "") + std::to_string(std::llabs(e));
    return out;
}

inline std::string rat_string(const Rat& v) {
    if (denominator(v) == 1) return numerator(v).str();
    return numerator(v).str() + "/" + denominator(v).str();
}

inline std::int64_t gcd_i64(std::int64_t a, std::int64_t b) {
    while (b) { std::int64_t t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
}

} // namespace wdio
