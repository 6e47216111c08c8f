// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <fstream>
#include <string>
#include <vector>

#include "wdio/target.hpp"
#include "wdio/weight.hpp"

namespace wdio {
namespace detail {

inline void skip_ws(const std::string& s, size_t& pos) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
}

/// Splits at top-level commas (parentheses nest).
inline std::vector<std::string> split_top_level(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        char c = i < s.size() ? s[i] : sep;
        if (c == '(') ++depth;
        else if (c == ')') --depth;
        else if (c == sep && depth == 0 && i <= s.size()) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    if (depth != 0) throw input_error("unbalanced parentheses");
    return out;
}

inline std::string trimmed(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace detail

/// "a/b", integer, or decimal ("0.25" = 1/4), with optional sign.
inline Rat parse_rational(const std::string& raw) {
    std::string s = detail::trimmed(raw);
    if (s.empty()) throw input_error("empty rational");
    size_t pos = 0;
    bool neg = false;
    if (s[pos] == '+' || s[pos] == '-') neg = (s[pos++] == '-');
    size_t ds = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (ds == pos) throw input_error("expected digits in rational '" + s + "'", static_cast<long long>(pos) + 1);
    Int num(s.substr(ds, pos - ds));
    Int den = 1;
    if (pos < s.size() && s[pos] == '/') {
        ++pos;
        size_t qs = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (qs == pos) throw input_error("expected denominator in '" + s + "'", static_cast<long long>(pos) + 1);
        den = Int(s.substr(qs, pos - qs));
        if (den == 0) throw input_error("zero denominator in '" + s + "'");
    } else if (pos < s.size() && s[pos] == '.') {
        ++pos;
        size_t fs = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        std::string frac = s.substr(fs, pos - fs);
        for (char c : frac) {
            num = num * 10 + (c - '0');
            den *= 10;
        }
    }
    if (pos != s.size()) throw input_error("trailing characters in rational '" + s + "'", static_cast<long long>(pos) + 1);
    Rat r(num, den);
    return neg ? Rat(-r) : r;
}

namespace detail {

inline CReal parse_cf_constructor(const std::string& inner) {
    std::string body = trimmed(inner);
    if (body == "arith") {
        // partial quotients 1, 2, 3, ...
        return make_cf([](int n, const Int&, const Int&) { return Int(n); }, "cf(arith)");
    }
    if (body == "qdouble") {
        // a_{n+1} = q_n: log-scale doubling denominators, ordinary exponent ~ 2
        return make_cf([](int, const Int& q1, const Int&) { return q1 < 1 ? Int(1) : q1; },
                       "cf(qdouble)");
    }
    std::vector<Int> period;
    for (const std::string& part : split_top_level(body, ',')) {
        Rat r = parse_rational(part);
        if (denominator(r) != 1 || r < 1) throw input_error("cf quotients must be integers >= 1");
        period.push_back(numerator(r));
    }
    return make_cf_periodic(period);
}

inline Coordinate parse_base_term(const std::string& raw, bool& is_constructor) {
    std::string s = trimmed(raw);
    is_constructor = true;
    auto call_body = [&](const char* name) -> std::string {
        size_t n = std::string(name).size();
        if (s.rfind(std::string(name) + "(", 0) == 0 && s.back() == ')')
            return s.substr(n + 1, s.size() - n - 2);
        return std::string("\x01"); // sentinel: not this constructor
    };
    if (s == "golden") return Coordinate(make_golden());
    std::string b = call_body("sqrt");
    if (b != "\x01") {
        Rat rad = parse_rational(b);
        Int rn = boost::multiprecision::sqrt(numerator(rad));
        Int rd = boost::multiprecision::sqrt(denominator(rad));
        if (rad >= 0 && rn * rn == numerator(rad) && rd * rd == denominator(rad))
            return Coordinate(Rat(rn, rd)); // perfect square collapses to the rational
        return Coordinate(make_sqrt(rad));
    }
    b = call_body("liouville");
    if (b != "\x01") {
        Rat base = parse_rational(b);
        if (denominator(base) != 1 || base < 2) throw input_error("liouville base must be an integer >= 2");
        return Coordinate(make_liouville(static_cast<unsigned>(to_i64(numerator(base)))));
    }
    b = call_body("cf");
    if (b != "\x01") return Coordinate(parse_cf_constructor(b));
    b = call_body("affine");
    if (b != "\x01") {
        std::vector<std::string> parts = split_top_level(b, ',');
        if (parts.size() != 3) throw input_error("affine(mul,inner,add) needs three arguments");
        bool dummy;
        Coordinate inner = parse_base_term(parts[1], dummy);
        Rat mul = parse_rational(parts[0]), add = parse_rational(parts[2]);
        if (inner.is_rational()) return Coordinate(mul * inner.rational() + add);
        return Coordinate(make_affine(mul, inner.real(), add));
    }
    b = call_body("sum");
    if (b != "\x01") {
        std::vector<std::string> parts = split_top_level(b, ',');
        if (parts.size() != 2) throw input_error("sum(a,b) needs two arguments");
        bool d1, d2;
        Coordinate u = parse_base_term(parts[0], d1), v = parse_base_term(parts[1], d2);
        if (u.is_rational() && v.is_rational()) return Coordinate(u.rational() + v.rational());
        CReal cu = u.is_rational() ? make_const(u.rational()) : u.real();
        CReal cv = v.is_rational() ? make_const(v.rational()) : v.real();
        return Coordinate(make_sum(cu, cv));
    }
    b = call_body("mul");
    if (b != "\x01") {
        std::vector<std::string> parts = split_top_level(b, ',');
        if (parts.size() != 2) throw input_error("mul(a,b) needs two arguments");
        bool d1, d2;
        Coordinate u = parse_base_term(parts[0], d1), v = parse_base_term(parts[1], d2);
        if (u.is_rational() && v.is_rational()) return Coordinate(u.rational() * v.rational());
        CReal cu = u.is_rational() ? make_const(u.rational()) : u.real();
        CReal cv = v.is_rational() ? make_const(v.rational()) : v.real();
        return Coordinate(make_mul(cu, cv));
    }
    is_constructor = false;
    return Coordinate(parse_rational(s));
}

} // namespace detail

/// One coordinate: [-] base [ +/- rational ] or a plain rational/decimal.
/// Constructors: sqrt(r), golden, liouville(b), cf(a1,a2,...), cf(arith),
/// cf(qdouble), affine(m,inner,a), sum(a,b), mul(a,b).
inline Coordinate parse_coordinate(const std::string& raw) {
    std::string s = detail::trimmed(raw);
    if (s.empty()) throw input_error("empty coordinate");
    try {
        return Coordinate(parse_rational(s));
    } catch (const input_error&) {
        // not a plain rational; parse as constructor expression below
    }
    bool negate = false;
    if (s[0] == '-' || s[0] == '+') {
        negate = (s[0] == '-');
        s = detail::trimmed(s.substr(1));
    }
    int depth = 0;
    size_t split = std::string::npos;
    for (size_t i = 1; i < s.size() && split == std::string::npos; ++i) {
        if (s[i] == '(') ++depth;
        else if (s[i] == ')') --depth;
        else if ((s[i] == '+' || s[i] == '-') && depth == 0) split = i;
    }
    bool ctor = false;
    Coordinate base = detail::parse_base_term(
        split == std::string::npos ? s : detail::trimmed(s.substr(0, split)), ctor);
    Rat off(0);
    if (split != std::string::npos) {
        off = parse_rational(s.substr(split + 1));
        if (s[split] == '-') off = -off;
    }
    Rat mul = negate ? Rat(-1) : Rat(1);
    if (base.is_rational()) return Coordinate(mul * base.rational() + off);
    if (!negate && off == 0) return base;
    return Coordinate(make_affine(mul, base.real(), off));
}

inline TargetVector parse_target_vector(const std::string& s, unsigned precision_bits = kDefaultPrecisionBits) {
    std::vector<Coordinate> coords;
    for (const std::string& part : detail::split_top_level(s, ','))
        coords.push_back(parse_coordinate(part));
    return TargetVector(std::move(coords), precision_bits);
}

inline Weight parse_weight(const std::string& s) {
    std::vector<Rat> entries;
    for (const std::string& part : detail::split_top_level(s, ','))
        entries.push_back(parse_rational(part));
    return Weight(std::move(entries));
}

/// Weight set: "w1;w2;...", "grid(mesh)" (dim required), or "@file" with one
/// weight per line.
inline WeightSet parse_weight_set(const std::string& raw, int dim_hint = 0) {
    std::string s = detail::trimmed(raw);
    if (s.rfind("grid(", 0) == 0 && s.back() == ')') {
        Rat mesh = parse_rational(s.substr(5, s.size() - 6));
        if (mesh <= 0 || numerator(mesh) != 1)
            throw input_error("grid mesh must be of the form 1/g");
        if (dim_hint < 1) throw input_error("grid(mesh) needs the dimension from the target vector");
        return grid_weights(dim_hint, to_i64(denominator(mesh)));
    }
    if (!s.empty() && s[0] == '@') {
        std::ifstream in(s.substr(1));
        if (!in) throw input_error("cannot open weight file '" + s.substr(1) + "'");
        std::vector<Weight> ws;
        std::string line;
        while (std::getline(in, line)) {
            std::string t = detail::trimmed(line);
            if (t.empty() || t[0] == '#') continue;
            ws.push_back(parse_weight(t));
        }
        return WeightSet(std::move(ws));
    }
    std::vector<Weight> ws;
    for (const std::string& part : detail::split_top_level(s, ';'))
        ws.push_back(parse_weight(part));
    return WeightSet(std::move(ws));
}

} // namespace wdio
