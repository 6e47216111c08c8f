// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "wdio/magnitude.hpp"
#include "wdio/target.hpp"
#include "wdio/weight.hpp"

namespace wdio {

/// One term of a weighted max-profile: value = mag^(m/n) with n = m*w_i.
struct NormTerm {
    Mag mag;
    std::int64_t n; // weight numerator of this coordinate (> 0)
    int coord;
};

/// The exact-comparable content of a weighted quasi-norm: a max over terms
/// mag_i^(m/n_i), plus the contribution of zero-weight coordinates under the
/// limit convention (0 below 1, exactly 1 at 1, +infinity above 1).
struct NormProfile {
    std::vector<NormTerm> terms;
    std::int64_t m = 1;
    bool has_unit = false;     // some zero-weight coordinate with |x_i| = 1
    bool infinite = false;     // some zero-weight coordinate with |x_i| > 1
    /// Re-derives a term's magnitude at a higher dyadic scale; null for
    /// profiles whose magnitudes are all exact.
    std::function<Mag(int coord, int scale)> remake;
    int cur_scale = 0;
    int scale_cap = 0;

    bool all_zero() const {
        if (has_unit || infinite) return false;
        for (const NormTerm& t : terms)
            if (!t.mag.is_exact_zero()) return false;
        return true;
    }
};

namespace detail {

inline void refine_profile(NormProfile& p, int new_scale) {
    if (!p.remake) throw precision_limited("exact comparison unexpectedly undecided");
    if (new_scale > p.scale_cap)
        throw precision_limited("comparison undecided at precision cap (" +
                                std::to_string(p.scale_cap) + " bits)");
    p.cur_scale = new_scale;
    for (NormTerm& t : p.terms)
        if (t.mag.kind == Mag::Kind::dyadic) t.mag = p.remake(t.coord, new_scale);
}

inline bool has_dyadic_term(const NormProfile& p) {
    for (const NormTerm& t : p.terms)
        if (t.mag.kind == Mag::Kind::dyadic) return true;
    return false;
}

/// Indices of terms not strictly dominated by another term (candidate maxima).
/// Terms left mutually undecided both stay; the max-set algebra stays sound.
inline std::vector<size_t> max_candidates(const NormProfile& p) {
    std::vector<size_t> cand;
    const size_t n = p.terms.size();
    std::vector<bool> dominated(n, false);
    for (size_t i = 0; i < n; ++i) {
        if (dominated[i]) continue;
        for (size_t j = i + 1; j < n; ++j) {
            if (dominated[j]) continue;
            Cmp c = cmp_terms(p.terms[i].mag, p.terms[i].n, p.terms[j].mag, p.terms[j].n);
            if (c == Cmp::lt) { dominated[i] = true; break; }
            if (c == Cmp::gt || c == Cmp::eq) dominated[j] = true;
        }
    }
    for (size_t i = 0; i < n; ++i)
        if (!dominated[i]) cand.push_back(i);
    return cand;
}

} // namespace detail

/// Exact three-way comparison of two weighted max-profiles (values of two
/// quasi-norms, possibly under different weights). Escalates dyadic precision
/// up to each profile's cap, then reports precision_limited.
inline std::strong_ordering compare_profiles(NormProfile& a, NormProfile& b) {
    if (a.infinite || b.infinite) {
        if (a.infinite && b.infinite)
            throw precision_limited("comparison of two infinite quasi-norm values");
        return a.infinite ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    // zero-weight unit contributions act as an extra exact term of value 1
    auto with_unit = [](const NormProfile& p, std::vector<NormTerm>& scratch) {
        scratch.assign(p.terms.begin(), p.terms.end());
        if (p.has_unit) scratch.push_back(NormTerm{Mag::from_rational(Int(1), Int(1)), 1, -1});
    };
    for (;;) {
        std::vector<NormTerm> ta, tb;
        with_unit(a, ta);
        with_unit(b, tb);
        NormProfile pa{ta, a.m, false, false, nullptr, 0, 0};
        NormProfile pb{tb, b.m, false, false, nullptr, 0, 0};
        std::vector<size_t> ca = detail::max_candidates(pa);
        std::vector<size_t> cb = detail::max_candidates(pb);

        // max(A) < max(B)  <=>  every candidate a has some b with a < b
        auto forall_exists = [&](const std::vector<size_t>& xs, const NormProfile& px,
                                 const std::vector<size_t>& ys, const NormProfile& py,
                                 bool allow_eq) {
            for (size_t xi : xs) {
                bool found = false;
                for (size_t yi : ys) {
                    Cmp c = cmp_terms(px.terms[xi].mag, px.terms[xi].n, py.terms[yi].mag, py.terms[yi].n);
                    if (c == Cmp::lt || (allow_eq && c == Cmp::eq)) { found = true; break; }
                }
                if (!found) return false;
            }
            return true;
        };
        if (forall_exists(ca, pa, cb, pb, false)) return std::strong_ordering::less;
        if (forall_exists(cb, pb, ca, pa, false)) return std::strong_ordering::greater;
        if (forall_exists(ca, pa, cb, pb, true) && forall_exists(cb, pb, ca, pa, true))
            return std::strong_ordering::equal;

        // undecided: refine whichever profiles still have dyadic content
        bool progressed = false;
        int want_a = a.cur_scale > 0 ? a.cur_scale * 2 : 128;
        int want_b = b.cur_scale > 0 ? b.cur_scale * 2 : 128;
        if (a.remake && a.cur_scale < a.scale_cap && detail::has_dyadic_term(a)) {
            detail::refine_profile(a, std::min(want_a, a.scale_cap));
            progressed = true;
        }
        if (b.remake && b.cur_scale < b.scale_cap && detail::has_dyadic_term(b)) {
            detail::refine_profile(b, std::min(want_b, b.scale_cap));
            progressed = true;
        }
        if (!progressed)
            throw precision_limited("quasi-norm comparison undecided at precision cap");
    }
}

/// Exact decision of profile <= r (or < r when strict). The norm is
/// max over terms; zero-weight coordinates contribute 0 / 1 / infinity.
inline bool profile_leq_threshold(NormProfile& p, const Rat& r, bool strict) {
    if (p.infinite) return false;
    if (p.has_unit) {
        if (strict ? !(Rat(1) < r) : !(Rat(1) <= r)) return false;
    }
    for (;;) {
        bool undecided = false;
        for (const NormTerm& t : p.terms) {
            Cmp c = cmp_term_threshold(t.mag, t.n, p.m, r);
            if (c == Cmp::gt) return false;
            if (c == Cmp::eq && strict) return false;
            if (c == Cmp::unknown) undecided = true;
        }
        if (!undecided) return true;
        int want = p.cur_scale > 0 ? p.cur_scale * 2 : 128;
        if (!p.remake || p.cur_scale >= p.scale_cap || !detail::has_dyadic_term(p))
            throw precision_limited("threshold comparison undecided at precision cap");
        detail::refine_profile(p, std::min(want, p.scale_cap));
    }
}

/// The value of a weighted quasi-norm with exact comparison capability and a
/// certified rational approximation.
class QuasiNormValue {
  public:
    QuasiNormValue(NormProfile profile, unsigned precision_bits)
        : profile_(std::move(profile)), precision_(precision_bits) {}

    bool is_zero() const { return profile_.all_zero(); }
    bool is_infinite() const { return profile_.infinite; }
    const NormProfile& profile() const { return profile_; }

    /// Exact comparison against a rational threshold.
    bool leq(const Rat& r) const {
        NormProfile p = profile_;
        return profile_leq_threshold(p, r, false);
    }
    bool lt(const Rat& r) const {
        NormProfile p = profile_;
        return profile_leq_threshold(p, r, true);
    }

    /// Certified rational approximation: relative error <= 2^-(P+2).
    /// Refinement here may exceed the comparison-precision cap: relative
    /// accuracy of a tiny value needs scale ~ P + log2(1/value).
    Rat approx() const {
        if (profile_.infinite) throw internal_error("approx of infinite quasi-norm value");
        Rat best(0);
        bool met = profile_.has_unit;
        if (met) best = Rat(1);
        NormProfile p = profile_;
        const int hard_cap = p.scale_cap + 4096;
        for (NormTerm& t : p.terms) {
            while (t.mag.kind == Mag::Kind::dyadic &&
                   (t.mag.radius << (static_cast<int>(precision_) + 6)) >= t.mag.center) {
                if (!p.remake || p.cur_scale >= hard_cap)
                    throw precision_limited("cannot certify a relative approximation near zero");
                p.cur_scale = p.cur_scale > 0 ? p.cur_scale * 2 : 128;
                if (p.cur_scale > hard_cap) p.cur_scale = hard_cap;
                t.mag = p.remake(t.coord, p.cur_scale);
            }
            Rat v = term_value_approx(t, p.m, precision_);
            if (!met || v > best) { best = v; met = true; }
        }
        return best;
    }

    double to_double() const {
        if (profile_.infinite) return std::numeric_limits<double>::infinity();
        if (is_zero()) return 0.0;
        return approx().convert_to<double>();
    }

    std::string decimal(unsigned digits = 30) const {
        if (profile_.infinite) return "inf";
        if (is_zero()) return "0";
        return decimal_string(approx(), digits);
    }

  private:
    /// mag^(m/n) to relative error 2^-(P+4), via an integer n-th root.
    static Rat term_value_approx(const NormTerm& t, std::int64_t m, unsigned P) {
        Int num, den;
        if (t.mag.kind == Mag::Kind::exact) {
            num = t.mag.num;
            den = t.mag.den;
        } else if (t.mag.kind == Mag::Kind::quad) {
            // rationalize with relative error 2^-(P + 10 + log2 m)
            int extra = 10;
            std::int64_t mm2 = m;
            while (mm2 > 1) { mm2 >>= 1; ++extra; }
            Rat lo, hi;
            int k = 64;
            for (;;) {
                t.mag.bounds(k, lo, hi);
                if (lo > 0 && (hi - lo) * rat_pow(Rat(2), static_cast<int>(P) + extra) <= hi) break;
                if (k > static_cast<int>(P) * 8 + 8192)
                    throw precision_limited("quadratic magnitude too close to zero to rationalize");
                k *= 2;
            }
            num = numerator(hi);
            den = denominator(hi);
        } else {
            num = t.mag.center;
            den = Int(1) << t.mag.scale;
        }
        if (num == 0) return Rat(0);
        if (m % t.n == 0) return rat_pow(Rat(num, den), m / t.n); // exact integer power
        const auto n = static_cast<unsigned long>(t.n);
        const auto mm = static_cast<unsigned long>(m);
        // A = (num/den)^m * 2^(n*K); value ~ root_n(A) * 2^-K
        const unsigned long K = P + 8;
        Int A = (int_pow(num, mm) << (n * K)) / int_pow(den, mm);
        Int r = nth_root_floor(A, static_cast<unsigned>(n));
        return Rat(r, Int(1) << K);
    }

    NormProfile profile_;
    unsigned precision_;
};

namespace detail {

/// Build the profile of ||x||_w from coordinate intervals, at scale `scale`
/// with refinement cap derived from x's precision.
inline NormProfile profile_of_vector(const TargetVector& x, const Weight& w) {
    if (x.dim() != w.dim()) throw input_error("dimension mismatch between vector and weight");
    NormProfile p;
    p.m = w.common_den();
    const int cap = static_cast<int>(x.precision_bits());
    p.scale_cap = cap;
    p.cur_scale = std::min(96, cap);
    auto coord_mag = [&x](int i, int scale) {
        const Coordinate& c = x.coord(i);
        if (c.is_rational()) {
            Rat v = c.rational();
            if (v < 0) v = -v;
            return Mag::from_rational(v);
        }
        if (std::optional<QuadValue> qv = as_quadratic(c.real()))
            return Mag::quadratic(qv->u, qv->v, qv->D); // |x_i| via sign normalization
        RatInterval iv = c.interval(scale + 2);
        // |value| in dyadic form: center = round(mid * 2^s), radius covers width + rounding
        Rat lo = iv.lo < 0 && iv.hi <= 0 ? -iv.hi : iv.lo;
        Rat hi = iv.lo < 0 && iv.hi <= 0 ? -iv.lo : iv.hi;
        if (iv.lo < 0 && iv.hi > 0) { lo = Rat(0); hi = std::max(Rat(-iv.lo), iv.hi); }
        Int clo = floor_rat(lo * rat_pow(Rat(2), scale));
        Int chi = floor_rat(hi * rat_pow(Rat(2), scale)) + 1;
        Int center = (clo + chi) / 2;
        Int radius = chi - center;
        if (center < 0) center = 0;
        return Mag::dyadic(center, radius, scale);
    };
    bool need_remake = false;
    for (int i = 0; i < x.dim(); ++i) {
        std::int64_t ni = w.numerator_of(i);
        if (ni > 0) {
            p.terms.push_back(NormTerm{coord_mag(i, p.cur_scale), ni, i});
            if (!x.coord(i).is_rational()) need_remake = true;
        } else {
            // zero-weight coordinate: compare |x_i| against 1 exactly
            const Coordinate& c = x.coord(i);
            if (c.is_rational()) {
                Rat a = c.rational() < 0 ? Rat(-c.rational()) : c.rational();
                if (a > 1) p.infinite = true;
                else if (a == 1) p.has_unit = true;
            } else {
                int k = 16;
                for (;;) {
                    RatInterval iv = c.interval(k);
                    Rat alo = iv.lo, ahi = iv.hi;
                    if (alo < 0 && ahi <= 0) { std::swap(alo, ahi); alo = -alo; ahi = -ahi; }
                    else if (alo < 0) { ahi = std::max(Rat(-alo), ahi); alo = Rat(0); }
                    if (ahi < 1) break;
                    if (alo > 1) { p.infinite = true; break; }
                    if (k >= cap) throw precision_limited("zero-weight coordinate vs 1 undecided");
                    k = std::min(k * 2, cap);
                }
            }
        }
    }
    if (need_remake) p.remake = coord_mag;
    return p;
}

} // namespace detail

/// ||x||_w = max over w_i != 0 of |x_i|^(1/w_i), with the limit convention for
/// zero-weight coordinates.
inline QuasiNormValue quasi_norm(const TargetVector& x, const Weight& w) {
    return QuasiNormValue(detail::profile_of_vector(x, w), x.precision_bits());
}

/// Exact decision of ||x||_w <= r.
inline bool quasi_norm_leq(const TargetVector& x, const Weight& w, const Rat& r) {
    if (r < 0) throw input_error("threshold must be non-negative");
    NormProfile p = detail::profile_of_vector(x, w);
    return profile_leq_threshold(p, r, false);
}

/// Drops the first i coordinates of w, all of which must be exactly zero. The
/// remaining entries form a weight of R^(d-i).
inline Weight weight_restriction(const Weight& w, int i) {
    if (i < 1 || i > w.dim() - 1) throw input_error("restriction index out of range");
    for (int j = 0; j < i; ++j)
        if (w.entry(j) != 0)
            throw input_error("weight restriction requires dropped entries to be zero");
    std::vector<Rat> rest(w.entries().begin() + i, w.entries().end());
    return Weight(std::move(rest));
}

} // namespace wdio
