// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wdio/quasi_norm.hpp"

namespace wdio {

/// One strict-improvement record of a weighted best-approximation scan.
struct SeqEntry {
    std::int64_t q = 0;
    std::vector<Int> p;     // nearest integer vector at q (ties rounded down)
    std::vector<Mag> dist;  // |q x_i - p_i| per coordinate, exact-comparable
};

namespace detail {

inline Int coordinate_floor(const Coordinate& c, int cap) {
    if (c.is_rational()) return div_floor(numerator(c.rational()), denominator(c.rational()));
    int k = 16;
    for (;;) {
        RatInterval iv = c.interval(k);
        Int flo = floor_rat(iv.lo), fhi = floor_rat(iv.hi);
        if (flo == fhi) return flo;
        if (k >= cap) throw precision_limited("floor of coordinate undecided at cap");
        k = std::min(k * 2, cap);
    }
}

/// X with |frac(x)*2^s - X| <= 1, frac relative to the given floor.
inline Int coordinate_frac_scaled(const Coordinate& c, int s, const Int& fl) {
    RatInterval iv = c.interval(s + 2);
    Rat mid = (iv.lo + iv.hi) / 2 - Rat(fl);
    return floor_rat(mid * Rat(Int(1) << s) + Rat(1, 2));
}

/// Nearest integer to q*x, ties broken downward (declared below).
inline Int coordinate_nearest_p(const Coordinate& c, std::int64_t q, int scale0, int cap);

/// |q x - p| for the nearest multiple. Quadratic coordinates yield exact
/// quadratic magnitudes; other irrationals a dyadic interval at `scale`.
inline Mag coordinate_dist_mag(const Coordinate& c, std::int64_t q, int scale, int cap) {
    if (c.is_rational()) {
        const Rat& v = c.rational();
        Int r = mod_floor(Int(q) * numerator(v), denominator(v));
        Int d = denominator(v) - r;
        if (r <= d) d = r;
        return Mag::from_rational(d, denominator(v));
    }
    if (std::optional<QuadValue> qv = as_quadratic(c.real())) {
        Int p = coordinate_nearest_p(c, q, scale, cap);
        return Mag::quadratic(Rat(q) * qv->u - Rat(p), Rat(q) * qv->v, qv->D);
    }
    Int fl = coordinate_floor(c, cap);
    Int X = coordinate_frac_scaled(c, scale, fl);
    Int m = (Int(q) * X) & ((Int(1) << scale) - 1);
    Int d = (Int(1) << scale) - m;
    if (m <= d) d = m;
    return Mag::dyadic(std::move(d), Int(q), scale);
}

/// Nearest integer to q*x (ties broken downward).
inline Int coordinate_nearest_p(const Coordinate& c, std::int64_t q, int scale0, int cap) {
    if (c.is_rational()) {
        const Rat& v = c.rational();
        return round_nearest_tie_down(Int(q) * numerator(v), denominator(v));
    }
    Int fl = coordinate_floor(c, cap);
    int s = scale0;
    for (;;) {
        Int X = coordinate_frac_scaled(c, s, fl);
        Int full = Int(q) * X;
        Int half = Int(1) << (s - 1);
        Int m = full & ((Int(1) << s) - 1);
        Int dev = m > half ? Int(m - half) : Int(half - m);
        if (dev > q) return Int(q) * fl + ((full + half) >> s);
        if (s >= cap)
            throw precision_limited("nearest integer ambiguous at precision cap (q=" + std::to_string(q) + ")");
        s = std::min(s * 2, cap);
    }
}

/// Incremental per-coordinate residue tracker for q = 1, 2, 3, ...
/// Exact rational coordinates keep (q*num mod den); computable-real
/// coordinates keep (q*X mod 2^s) for a certified X ~ frac(x)*2^s.
class VectorScanner {
  public:
    VectorScanner(const TargetVector& x, int scale, int scale_cap)
        : x_(x), scale_(scale), scale_cap_(scale_cap) {
        const int d = x.dim();
        coords_.resize(static_cast<size_t>(d));
        for (int i = 0; i < d; ++i) {
            CoordState& c = coords_[static_cast<size_t>(i)];
            if (x.coord(i).is_rational()) {
                c.exact = true;
                const Rat& v = x.coord(i).rational();
                c.den = denominator(v);
                c.fl = div_floor(numerator(v), c.den);
                c.num = numerator(v) - c.fl * c.den; // frac numerator in [0, den)
                c.r = 0;
            } else {
                c.exact = false;
                c.fl = coord_floor(i);
                c.X = frac_scaled(i, scale_, c.fl);
                c.acc = 0;
                if (std::optional<QuadValue> qv = as_quadratic(x.coord(i).real())) {
                    c.is_quad = true;
                    c.qu = qv->u;
                    c.qv = qv->v;
                    c.qD = qv->D;
                }
            }
        }
        pow2_ = Int(1) << scale_;
        half_ = Int(1) << (scale_ - 1);
    }

    void step() {
        ++q_;
        for (CoordState& c : coords_) {
            if (c.exact) {
                c.r += c.num;
                if (c.r >= c.den) c.r -= c.den;
            } else {
                c.acc += c.X;
                if (c.acc >= pow2_) c.acc -= pow2_;
            }
        }
    }

    std::int64_t q() const { return q_; }
    int scale() const { return scale_; }
    int scale_cap() const { return scale_cap_; }
    int dim() const { return x_.dim(); }
    bool coord_exact(int i) const { return coords_[static_cast<size_t>(i)].exact; }
    const Int& coord_den(int i) const { return coords_[static_cast<size_t>(i)].den; }

    /// Exact residue distance numerator: dist = min(r, den-r); value dist/den.
    Int exact_dist_num(int i) const {
        const CoordState& c = coords_[static_cast<size_t>(i)];
        Int d = c.den - c.r;
        return c.r <= d ? c.r : d;
    }

    /// Dyadic distance center at the scanner scale; true dist in
    /// [(c-q)2^-s, (c+q)2^-s].
    Int dyadic_dist_center(int i) const {
        const CoordState& c = coords_[static_cast<size_t>(i)];
        Int d = pow2_ - c.acc;
        return c.acc <= d ? c.acc : d;
    }

    Mag current_dist_mag(int i) const { return dist_mag_at(q_, i, scale_); }

    /// Distance magnitude at arbitrary (q, scale); used for refinement and for
    /// record snapshots. Exact and quadratic coordinates ignore the scale.
    Mag dist_mag_at(std::int64_t q, int i, int scale) const {
        const CoordState& c = coords_[static_cast<size_t>(i)];
        if (c.exact) {
            Int r = mod_floor(Int(q) * c.num, c.den);
            Int d = c.den - r;
            if (r <= d) d = r;
            return Mag::from_rational(d, c.den);
        }
        if (c.is_quad) {
            Int p = nearest_p(q, i);
            return Mag::quadratic(Rat(q) * c.qu - Rat(p), Rat(q) * c.qv, c.qD);
        }
        Int X = (scale == scale_) ? c.X : frac_scaled(i, scale, c.fl);
        Int full = Int(q) * X;
        Int m = full & ((Int(1) << scale) - 1);
        Int d = (Int(1) << scale) - m;
        if (m <= d) d = m;
        return Mag::dyadic(std::move(d), Int(q), scale);
    }

    /// Nearest integer to q*x_i, ties broken downward. Refines the coordinate
    /// until the rounding is unambiguous.
    Int nearest_p(std::int64_t q, int i) const {
        const CoordState& c = coords_[static_cast<size_t>(i)];
        if (c.exact) return Int(q) * c.fl + round_nearest_tie_down(Int(q) * c.num, c.den);
        int s = scale_;
        for (;;) {
            Int X = (s == scale_) ? c.X : frac_scaled(i, s, c.fl);
            Int full = Int(q) * X;
            Int half = Int(1) << (s - 1);
            Int m = full & ((Int(1) << s) - 1);
            Int dev = m > half ? Int(m - half) : Int(half - m);
            if (dev > q) return Int(q) * c.fl + ((full + half) >> s);
            if (s >= scale_cap_)
                throw precision_limited("nearest integer ambiguous at precision cap (coordinate " +
                                        std::to_string(i) + ", q=" + std::to_string(q) + ")");
            s = std::min(s * 2, scale_cap_);
        }
    }

  private:
    struct CoordState {
        bool exact = true;
        Int num, den = 1, fl; // exact: x = fl + num/den
        Int r;                // exact: (q*num) mod den
        Int X;                // dyadic: round(frac(x) * 2^s)
        Int acc;              // dyadic: (q*X) mod 2^s
        bool is_quad = false; // x = qu + qv sqrt(qD): exact quadratic decisions
        Rat qu, qv;
        Int qD;
    };

    Int coord_floor(int i) const {
        int k = 16;
        for (;;) {
            RatInterval iv = x_.coord(i).interval(k);
            Int flo = floor_rat(iv.lo), fhi = floor_rat(iv.hi);
            if (flo == fhi) return flo;
            if (k >= scale_cap_) throw precision_limited("floor of coordinate undecided at cap");
            k = std::min(k * 2, scale_cap_);
        }
    }

    /// X with |frac(x_i)*2^s - X| <= 1.
    Int frac_scaled(int i, int s, const Int& fl) const {
        RatInterval iv = x_.coord(i).interval(s + 2);
        Rat mid = (iv.lo + iv.hi) / 2 - Rat(fl);
        return floor_rat(mid * Rat(Int(1) << s) + Rat(1, 2));
    }

    const TargetVector& x_;
    int scale_, scale_cap_;
    std::int64_t q_ = 0;
    std::vector<CoordState> coords_;
    Int pow2_, half_;
};

inline int scan_scale_for(const TargetVector& x, std::int64_t q_max) {
    int qb = 1;
    while ((std::int64_t(1) << qb) < q_max && qb < 62) ++qb;
    (void)x;
    return 96 + qb;
}

inline int scan_cap_for(const TargetVector& x, std::int64_t q_max) {
    int qb = 1;
    while ((std::int64_t(1) << qb) < q_max && qb < 62) ++qb;
    return static_cast<int>(x.precision_bits()) + qb + 64;
}

/// Collects the full sequence of strict-improvement records of
/// q -> ||q x - p||_w for q = 1..q_max. Exact decisions throughout.
class BestSeqEngine {
  public:
    BestSeqEngine(const TargetVector& x, const Weight& w, std::int64_t q_max)
        : x_(x), w_(w), q_max_(q_max),
          scanner_(x, scan_scale_for(x, q_max), scan_cap_for(x, q_max)) {
        if (x.dim() != w.dim()) throw input_error("dimension mismatch between vector and weight");
        for (int i = 0; i < w.dim(); ++i)
            if (w.numerator_of(i) > 0) profile_coords_.push_back(i);
    }

    /// Runs the scan; returns records in increasing q. terminated() reports
    /// whether the error reached exactly zero.
    const std::vector<SeqEntry>& run() {
        records_.clear();
        terminated_ = false;
        while (scanner_.q() < q_max_) {
            scanner_.step();
            const std::int64_t q = scanner_.q();
            if (!records_.empty()) {
                bool reject = false;
                size_t k = 0;
                for (int i : profile_coords_) {
                    const RejectBound& rb = reject_[k++];
                    if (scanner_.coord_exact(i)) {
                        if (scanner_.exact_dist_num(i) >= rb.bound) { reject = true; break; }
                    } else {
                        if (scanner_.dyadic_dist_center(i) - q >= rb.bound) { reject = true; break; }
                    }
                }
                if (reject) continue;
                if (!improves(q)) continue;
            }
            install_record(q);
            if (terminated_) break;
        }
        return records_;
    }

    bool terminated() const { return terminated_; }
    const std::vector<SeqEntry>& records() const { return records_; }
    const Weight& weight() const { return w_; }
    int scale_cap() const { return scanner_.scale_cap(); }

    /// Recompute a stored record's coordinate distance at a higher scale.
    Mag refine_dist(const SeqEntry& e, int coord, int scale) const {
        return scanner_.dist_mag_at(e.q, coord, scale);
    }

    /// Profile of a stored record for external exact comparisons.
    NormProfile profile_of(const SeqEntry& e) const {
        NormProfile p;
        p.m = w_.common_den();
        for (int i : profile_coords_)
            p.terms.push_back(NormTerm{e.dist[static_cast<size_t>(i)], w_.numerator_of(i), i});
        p.cur_scale = scanner_.scale();
        p.scale_cap = scanner_.scale_cap();
        std::int64_t q = e.q;
        const VectorScanner* sc = &scanner_;
        p.remake = [sc, q](int coord, int scale) { return sc->dist_mag_at(q, coord, scale); };
        return p;
    }

  private:
    struct RejectBound { Int bound; };

    bool improves(std::int64_t q) {
        NormProfile cand;
        cand.m = w_.common_den();
        for (int i : profile_coords_)
            cand.terms.push_back(NormTerm{scanner_.current_dist_mag(i), w_.numerator_of(i), i});
        cand.cur_scale = scanner_.scale();
        cand.scale_cap = scanner_.scale_cap();
        const VectorScanner* sc = &scanner_;
        cand.remake = [sc, q](int coord, int scale) { return sc->dist_mag_at(q, coord, scale); };
        NormProfile rec = profile_of(records_.back());
        return compare_profiles(cand, rec) == std::strong_ordering::less;
    }

    void install_record(std::int64_t q) {
        SeqEntry e;
        e.q = q;
        const int d = scanner_.dim();
        e.p.reserve(static_cast<size_t>(d));
        e.dist.reserve(static_cast<size_t>(d));
        for (int i = 0; i < d; ++i) {
            e.p.push_back(scanner_.nearest_p(q, i));
            e.dist.push_back(scanner_.dist_mag_at(q, i, scanner_.scale()));
        }
        bool zero = true;
        for (int i : profile_coords_)
            if (!e.dist[static_cast<size_t>(i)].is_exact_zero()) { zero = false; break; }
        records_.push_back(std::move(e));
        terminated_ = zero;
        if (!zero) recompute_reject_bounds();
    }

    /// Champion = record term with the largest upper bound (bounds always
    /// compare exactly). Reject bound per coordinate i: an integer B with
    /// dist_i >= B (in that coordinate's representation) implying
    /// term_i >= champion upper bound, hence no strict improvement.
    void recompute_reject_bounds() {
        const SeqEntry& e = records_.back();
        // champion upper bound as a rational hi_n/hi_d with exponent n_c
        Int hi_n, hi_d;
        std::int64_t n_c = 0;
        for (int i : profile_coords_) {
            Rat blo, bhi;
            e.dist[static_cast<size_t>(i)].bounds(96, blo, bhi);
            Int cn = numerator(bhi), cd = denominator(bhi);
            std::int64_t ni = w_.numerator_of(i);
            bool take = (n_c == 0);
            if (!take) {
                // (cn/cd)^(1/ni) > (hi_n/hi_d)^(1/n_c) ?
                Int lhs = int_pow(cn, static_cast<unsigned long>(n_c)) *
                          int_pow(hi_d, static_cast<unsigned long>(ni));
                Int rhs = int_pow(hi_n, static_cast<unsigned long>(ni)) *
                          int_pow(cd, static_cast<unsigned long>(n_c));
                take = lhs > rhs;
            }
            if (take) { hi_n = cn; hi_d = cd; n_c = ni; }
        }
        reject_.clear();
        for (int i : profile_coords_) {
            const auto ni = static_cast<unsigned long>(w_.numerator_of(i));
            const auto nc = static_cast<unsigned>(n_c);
            Int A;
            if (scanner_.coord_exact(i)) {
                // B ~ ceil(den_i * (hi_n/hi_d)^(ni/n_c)), slack +3 keeps it sound
                A = int_pow(scanner_.coord_den(i), nc) * int_pow(hi_n, ni) / int_pow(hi_d, ni);
            } else {
                // B at the scanner scale: ceil(2^s * (hi_n/hi_d)^(ni/n_c))
                A = (int_pow(hi_n, ni) << (static_cast<unsigned long>(scanner_.scale()) * nc));
                A /= int_pow(hi_d, ni);
            }
            reject_.push_back(RejectBound{nth_root_floor(A, nc) + 3});
        }
    }

    const TargetVector& x_;
    const Weight& w_;
    std::int64_t q_max_;
    VectorScanner scanner_;
    std::vector<int> profile_coords_;
    std::vector<SeqEntry> records_;
    std::vector<RejectBound> reject_;
    bool terminated_ = false;
};

/// Natural log of the quasi-norm value of a record (max_i dist_i^(m/n_i)).
/// Requires a nonzero error.
inline double log_err_of(const SeqEntry& e, const Weight& w) {
    bool first = true;
    double best = 0;
    for (int i = 0; i < w.dim(); ++i) {
        std::int64_t ni = w.numerator_of(i);
        if (ni == 0) continue;
        const Mag& m = e.dist[static_cast<size_t>(i)];
        if (m.is_exact_zero()) continue; // zero term cannot attain a nonzero max
        double v = (static_cast<double>(w.common_den()) / static_cast<double>(ni)) * m.log_value();
        if (first || v > best) { best = v; first = false; }
    }
    if (first) throw internal_error("log_err_of called on a zero-error record");
    return best;
}

} // namespace detail
} // namespace wdio
