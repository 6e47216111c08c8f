// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <optional>

#include "wdio/rational.hpp"

namespace wdio {

/// A non-negative real magnitude with exact comparison support. Three kinds:
///   exact    num/den
///   quad     u + v sqrt(D)      (D >= 2 not a perfect square, v != 0; the
///                                stored combination is sign-normalized >= 0)
///   dyadic   [(center-radius) 2^-scale, (center+radius) 2^-scale]
/// Exact and quad magnitudes decide every comparison; dyadic ones may need
/// refinement by their owner.
struct Mag {
    enum class Kind { exact, dyadic, quad };
    Kind kind = Kind::exact;
    Int num = 0, den = 1;       // exact
    Int center = 0, radius = 0; // dyadic
    int scale = 0;
    Rat qu, qv;                 // quad
    Int qD;

    static Mag from_rational(Int n, Int d) {
        if (d <= 0) throw internal_error("Mag with non-positive denominator");
        if (n < 0) n = -n;
        Mag m;
        m.kind = Kind::exact;
        m.num = std::move(n);
        m.den = std::move(d);
        return m;
    }
    static Mag from_rational(const Rat& r) { return from_rational(numerator(r), denominator(r)); }

    static Mag dyadic(Int center, Int radius, int scale) {
        if (center < 0) throw internal_error("Mag with negative dyadic center");
        Mag m;
        m.kind = Kind::dyadic;
        m.center = std::move(center);
        m.radius = std::move(radius);
        m.scale = scale;
        return m;
    }

    /// |u + v sqrt(D)|; falls back to the exact kind when v = 0.
    static Mag quadratic(Rat u, Rat v, Int D);

    bool is_exact_zero() const { return kind == Kind::exact && num == 0; }

    double to_double() const;
    double log_value() const;
    /// Rational enclosure of width <= 2^-k (exact kinds return a point).
    void bounds(int k, Rat& lo, Rat& hi) const;
};

enum class Cmp { lt, eq, gt, unknown };

namespace detail {

/// Exact sign of u + v sqrt(D) for non-square D >= 2.
inline int quad_sign(const Rat& u, const Rat& v, const Int& D) {
    if (v == 0) return u < 0 ? -1 : (u == 0 ? 0 : 1);
    if (u == 0) return v < 0 ? -1 : 1;
    const bool upos = u > 0, vpos = v > 0;
    if (upos == vpos) return upos ? 1 : -1;
    int c = Rat(u * u).compare(Rat(v * v * D));
    if (c == 0) throw internal_error("quadratic with square discriminant");
    if (c > 0) return upos ? 1 : -1; // |u| > |v| sqrt(D): the rational part wins
    return vpos ? 1 : -1;
}

struct QuadElem {
    Rat u, v;
};

inline QuadElem quad_mul(const QuadElem& a, const QuadElem& b, const Int& D) {
    return {a.u * b.u + a.v * b.v * D, a.u * b.v + a.v * b.u};
}

inline QuadElem quad_pow(QuadElem base, unsigned long e, const Int& D) {
    QuadElem r{Rat(1), Rat(0)};
    while (e) {
        if (e & 1) r = quad_mul(r, base, D);
        e >>= 1;
        if (e) base = quad_mul(base, base, D);
    }
    return r;
}

/// Rational enclosure of u + v sqrt(D) of width <= 2^-k.
inline void quad_elem_bounds(const Rat& u, const Rat& v, const Int& D, int k, Rat& lo, Rat& hi) {
    int kk = k + 4;
    // |v| can exceed 1; widen the sqrt precision accordingly
    Rat av = abs(v);
    while (av > 1) { av /= 2; kk += 1; }
    Int scaled = D << (2 * kk);
    Int s = boost::multiprecision::sqrt(scaled);
    Rat slo(s, Int(1) << kk), shi(s + 1, Int(1) << kk);
    if (v >= 0) { lo = u + v * slo; hi = u + v * shi; }
    else { lo = u + v * shi; hi = u + v * slo; }
}

/// One side of a comparison, raised to an integer power: an exact rational, a
/// quadratic irrational, or a rational interval.
struct PowSide {
    enum class Kind { rational, quad, interval } kind;
    Rat r;      // rational
    Rat u, v;   // quad (v != 0)
    Int D;
    Rat lo, hi; // interval
};

inline PowSide pow_side(const Mag& m, unsigned long e) {
    PowSide s;
    switch (m.kind) {
        case Mag::Kind::exact: {
            s.kind = PowSide::Kind::rational;
            s.r = Rat(int_pow(m.num, e), int_pow(m.den, e));
            return s;
        }
        case Mag::Kind::quad: {
            QuadElem p = quad_pow(QuadElem{m.qu, m.qv}, e, m.qD);
            if (p.v == 0) {
                s.kind = PowSide::Kind::rational;
                s.r = p.u;
            } else {
                s.kind = PowSide::Kind::quad;
                s.u = p.u;
                s.v = p.v;
                s.D = m.qD;
            }
            return s;
        }
        case Mag::Kind::dyadic:
        default: {
            s.kind = PowSide::Kind::interval;
            Int lo = m.center - m.radius;
            if (lo < 0) lo = 0;
            Int hi = m.center + m.radius;
            Int den = Int(1) << m.scale;
            s.lo = Rat(int_pow(lo, e), int_pow(den, e));
            s.hi = Rat(int_pow(hi, e), int_pow(den, e));
            return s;
        }
    }
}

inline void side_bounds(const PowSide& s, int k, Rat& lo, Rat& hi) {
    switch (s.kind) {
        case PowSide::Kind::rational: lo = hi = s.r; return;
        case PowSide::Kind::quad: quad_elem_bounds(s.u, s.v, s.D, k, lo, hi); return;
        default: lo = s.lo; hi = s.hi; return;
    }
}

/// Compare two powered sides. Exact outcomes whenever neither side is an
/// interval; intervals may yield unknown (the owner refines and retries).
inline Cmp cmp_sides(const PowSide& a, const PowSide& b) {
    using K = PowSide::Kind;
    if (a.kind == K::rational && b.kind == K::rational) {
        int c = a.r.compare(b.r);
        return c < 0 ? Cmp::lt : (c > 0 ? Cmp::gt : Cmp::eq);
    }
    if (a.kind == K::rational && b.kind == K::quad) {
        int sgn = quad_sign(b.u - a.r, b.v, b.D); // sign of b - a
        return sgn > 0 ? Cmp::lt : (sgn < 0 ? Cmp::gt : Cmp::eq);
    }
    if (a.kind == K::quad && b.kind == K::rational) {
        Cmp c = cmp_sides(b, a);
        return c == Cmp::lt ? Cmp::gt : (c == Cmp::gt ? Cmp::lt : c);
    }
    if (a.kind == K::quad && b.kind == K::quad) {
        if (a.D == b.D) {
            int sgn = quad_sign(a.u - b.u, a.v - b.v, a.D);
            return sgn < 0 ? Cmp::lt : (sgn > 0 ? Cmp::gt : Cmp::eq);
        }
        // distinct square-free discriminants: the two irrational values differ,
        // so interval refinement terminates
        for (int k = 128; k <= 1 << 14; k *= 2) {
            Rat alo, ahi, blo, bhi;
            quad_elem_bounds(a.u, a.v, a.D, k, alo, ahi);
            quad_elem_bounds(b.u, b.v, b.D, k, blo, bhi);
            if (ahi < blo) return Cmp::lt;
            if (alo > bhi) return Cmp::gt;
        }
        return Cmp::unknown;
    }
    // at least one interval: make the non-interval side tighter than the
    // interval's own resolution, so refinement pressure stays on the owner
    auto width_bits = [](const PowSide& s) {
        if (s.kind != K::interval) return 0;
        Rat w = s.hi - s.lo;
        if (w <= 0) return 512;
        double lg = log_rat(w) / std::log(2.0);
        int k = static_cast<int>(-lg) + 16;
        return std::min(std::max(k, 64), 1 << 14);
    };
    int k = std::max({256, width_bits(a), width_bits(b)});
    Rat alo, ahi, blo, bhi;
    side_bounds(a, k, alo, ahi);
    side_bounds(b, k, blo, bhi);
    if (ahi < blo) return Cmp::lt;
    if (alo > bhi) return Cmp::gt;
    return Cmp::unknown;
}

inline PowSide scale_side(PowSide s, const Rat& f) {
    switch (s.kind) {
        case PowSide::Kind::rational: s.r *= f; break;
        case PowSide::Kind::quad: s.u *= f; s.v *= f; break;
        default: s.lo *= f; s.hi *= f; break;
    }
    return s;
}

} // namespace detail

inline Mag Mag::quadratic(Rat u, Rat v, Int D) {
    if (v == 0) {
        if (u < 0) u = -u;
        return from_rational(u);
    }
    if (D < 2) throw internal_error("quadratic magnitude needs D >= 2");
    int sgn = detail::quad_sign(u, v, D);
    if (sgn < 0) { u = -u; v = -v; }
    Mag m;
    m.kind = Kind::quad;
    m.qu = std::move(u);
    m.qv = std::move(v);
    m.qD = std::move(D);
    return m;
}

inline double Mag::to_double() const {
    switch (kind) {
        case Kind::exact: return Rat(num, den).convert_to<double>();
        case Kind::quad:
            return qu.convert_to<double>() +
                   qv.convert_to<double>() * std::sqrt(qD.convert_to<double>());
        default: return Rat(center, Int(1) << scale).convert_to<double>();
    }
}

inline double Mag::log_value() const {
    switch (kind) {
        case Kind::exact:
            if (num == 0) throw internal_error("log of zero magnitude");
            return log_int(num) - log_int(den);
        case Kind::quad: {
            Rat lo, hi;
            for (int k = 64;; k *= 2) {
                bounds(k, lo, hi);
                if (lo > 0 && (hi - lo) * rat_pow(Rat(2), 40) <= lo) break;
                if (k > 1 << 14)
                    throw internal_error("quadratic magnitude not separated from zero");
            }
            return log_rat(Rat((lo + hi) / 2));
        }
        default:
            if (center <= radius) throw internal_error("log of magnitude whose interval touches zero");
            return log_int(center) - scale * std::log(2.0);
    }
}

inline void Mag::bounds(int k, Rat& lo, Rat& hi) const {
    switch (kind) {
        case Kind::exact: lo = hi = Rat(num, den); return;
        case Kind::quad: detail::quad_elem_bounds(qu, qv, qD, k, lo, hi); return;
        default: {
            Int l = center - radius;
            if (l < 0) l = 0;
            lo = Rat(l, Int(1) << scale);
            hi = Rat(center + radius, Int(1) << scale);
            return;
        }
    }
}

/// Compare term values a^(1/na) vs b^(1/nb), i.e. a^nb vs b^na. Exact unless a
/// dyadic magnitude is too coarse; eq is always genuine equality.
inline Cmp cmp_terms(const Mag& a, std::int64_t na, const Mag& b, std::int64_t nb) {
    return detail::cmp_sides(detail::pow_side(a, static_cast<unsigned long>(nb)),
                             detail::pow_side(b, static_cast<unsigned long>(na)));
}

/// Compare a^(m/n) against a rational threshold r >= 0: a^m vs r^n.
inline Cmp cmp_term_threshold(const Mag& a, std::int64_t n, std::int64_t m, const Rat& r) {
    if (r < 0) throw internal_error("negative threshold");
    detail::PowSide rs;
    rs.kind = detail::PowSide::Kind::rational;
    rs.r = rat_pow(r, static_cast<long>(n));
    return detail::cmp_sides(detail::pow_side(a, static_cast<unsigned long>(m)), rs);
}

/// Compare a^(m/n) against Q^(-u/v) for integer Q >= 1:
/// a^(m v) * Q^(u n) vs 1.
inline Cmp cmp_term_pow_threshold(const Mag& a, std::int64_t n, std::int64_t m, std::int64_t Q,
                                  std::int64_t u, std::int64_t v) {
    detail::PowSide lhs = detail::pow_side(a, static_cast<unsigned long>(m * v));
    lhs = detail::scale_side(std::move(lhs), Rat(int_pow(Int(Q), static_cast<unsigned long>(u * n))));
    detail::PowSide one;
    one.kind = detail::PowSide::Kind::rational;
    one.r = Rat(1);
    return detail::cmp_sides(lhs, one);
}

/// Rigorous double bounds on log(value); infinite lower bound for zero.
inline void mag_log_bounds(const Mag& m, double& llo, double& lhi) {
    switch (m.kind) {
        case Mag::Kind::exact:
            if (m.num == 0) { llo = lhi = -1e300; return; }
            llo = lhi = log_int(m.num) - log_int(m.den);
            // double log error is ~1e-13 relative; pad generously
            llo -= 1e-9;
            lhi += 1e-9;
            return;
        case Mag::Kind::quad: {
            Rat lo, hi;
            m.bounds(64, lo, hi);
            llo = lo <= 0 ? -1e300 : log_rat(lo) - 1e-9;
            lhi = log_rat(hi) + 1e-9;
            return;
        }
        default: {
            Int l = m.center - m.radius;
            llo = l <= 0 ? -1e300 : log_int(l) - m.scale * std::log(2.0) - 1e-9;
            lhi = log_int(Int(m.center + m.radius)) - m.scale * std::log(2.0) + 1e-9;
            return;
        }
    }
}

} // namespace wdio
