// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "wdio/scan.hpp"

namespace wdio {

/// Estimator knobs shared by the finite-scale exponent surrogates.
struct EstimatorConfig {
    double tail_fraction = 0.2; // fraction of gaps / entries / grid points in the tail window
    int tail_min = 2;           // minimum window size (gaps or entries)
    int grid_tail_min = 4;      // minimum window size on the Q grid
    double grid_ratio = 1.25;   // geometric Q grid ratio
    std::int64_t grid_start = 10;
};

/// A denominator q with its nearest integer vector and exact-comparable error.
struct Approximant {
    std::int64_t q = 0;
    std::vector<Int> p;
    QuasiNormValue err;
};

struct BestSequence {
    std::vector<Approximant> entries;
    bool terminated = false; // error reached exactly 0
    std::int64_t q_max = 0;
};

namespace detail {

/// Error profile of q x - p with a self-sufficient refinement closure (keeps a
/// shared copy of the vector, so the value outlives any engine).
inline NormProfile error_profile(const std::shared_ptr<TargetVector>& x, const Weight& w,
                                 std::int64_t q, std::vector<Mag> dists) {
    NormProfile p;
    p.m = w.common_den();
    const int cap = scan_cap_for(*x, q + 1);
    p.scale_cap = cap;
    p.cur_scale = 0;
    for (int i = 0; i < x->dim(); ++i) {
        std::int64_t ni = w.numerator_of(i);
        if (ni == 0) continue; // |q x_i - p_i| <= 1/2 < 1 contributes 0
        p.cur_scale = std::max(p.cur_scale, dists[static_cast<size_t>(i)].kind == Mag::Kind::dyadic
                                                ? dists[static_cast<size_t>(i)].scale : 0);
        p.terms.push_back(NormTerm{dists[static_cast<size_t>(i)], ni, i});
    }
    bool any_real = false;
    for (int i = 0; i < x->dim(); ++i)
        if (!x->coord(i).is_rational()) any_real = true;
    if (any_real)
        p.remake = [x, q, cap](int coord, int scale) {
            return coordinate_dist_mag(x->coord(coord), q, scale, cap);
        };
    return p;
}

inline Approximant make_approximant(const std::shared_ptr<TargetVector>& x, const Weight& w,
                                    std::int64_t q) {
    const int scale = scan_scale_for(*x, q + 1);
    const int cap = scan_cap_for(*x, q + 1);
    std::vector<Int> p;
    std::vector<Mag> dists;
    for (int i = 0; i < x->dim(); ++i) {
        p.push_back(coordinate_nearest_p(x->coord(i), q, scale, cap));
        dists.push_back(coordinate_dist_mag(x->coord(i), q, scale, cap));
    }
    return Approximant{q, std::move(p),
                       QuasiNormValue(error_profile(x, w, q, std::move(dists)), x->precision_bits())};
}

} // namespace detail

/// Nearest-integer-vector approximant at denominator q.
inline Approximant min_error(const TargetVector& x, const Weight& w, std::int64_t q) {
    if (x.dim() != w.dim()) throw input_error("dimension mismatch");
    if (q < 1) throw input_error("q must be positive");
    auto xs = std::make_shared<TargetVector>(x);
    return detail::make_approximant(xs, w, q);
}

/// First q in 1..Q with ||q x - p||_w < 1/Q (exact strict test). Existence is
/// guaranteed; a failure to find one can only come from an undecidable
/// borderline at the precision cap.
inline Approximant dirichlet_solve(const TargetVector& x, const Weight& w, std::int64_t Q) {
    if (x.dim() != w.dim()) throw input_error("dimension mismatch");
    if (Q < 1) throw input_error("Q must be positive");
    detail::VectorScanner sc(x, detail::scan_scale_for(x, Q), detail::scan_cap_for(x, Q));
    std::vector<int> coords;
    for (int i = 0; i < w.dim(); ++i)
        if (w.numerator_of(i) > 0) coords.push_back(i);
    const std::int64_t m = w.common_den();
    const double logQ = std::log(static_cast<double>(Q));
    const double ln2 = std::log(2.0);
    bool blocked = false;
    for (std::int64_t q = 1; q <= Q; ++q) {
        sc.step();
        bool ok = true, borderline = false;
        for (int i : coords) {
            const std::int64_t ni = w.numerator_of(i);
            // success for this coordinate:  dist^m < Q^-ni
            Cmp c = Cmp::unknown;
            if (sc.coord_exact(i)) {
                Int lhs = int_pow(sc.exact_dist_num(i), static_cast<unsigned long>(m)) *
                          int_pow(Int(Q), static_cast<unsigned long>(ni));
                int k = lhs.compare(int_pow(sc.coord_den(i), static_cast<unsigned long>(m)));
                c = k < 0 ? Cmp::lt : Cmp::gt; // equality counts as failure of the strict test
            } else {
                // double prefilter on m*log(dist) + ni*log(Q)
                Int center = sc.dyadic_dist_center(i);
                double slo = center > q
                    ? static_cast<double>(m) * (log_int(Int(center - q)) - sc.scale() * ln2) +
                          static_cast<double>(ni) * logQ
                    : -1e18;
                double shi = static_cast<double>(m) * (log_int(Int(center + q)) - sc.scale() * ln2) +
                             static_cast<double>(ni) * logQ;
                if (shi < -1e-6) c = Cmp::lt;
                else if (slo > 1e-6) c = Cmp::gt;
                else {
                    // exact escalation: dist^m * Q^ni vs 1
                    Mag mg = sc.current_dist_mag(i);
                    c = cmp_term_pow_threshold(mg, ni, m, Q, 1, 1);
                    int s = sc.scale();
                    while (c == Cmp::unknown && s < sc.scale_cap()) {
                        s = std::min(s * 2, sc.scale_cap());
                        mg = sc.dist_mag_at(q, i, s);
                        c = cmp_term_pow_threshold(mg, ni, m, Q, 1, 1);
                    }
                    if (c == Cmp::eq) c = Cmp::gt; // exact equality fails the strict test
                }
            }
            if (c == Cmp::lt) continue;
            ok = false;
            if (c == Cmp::unknown) { borderline = true; continue; }
            break; // decisive failure at this q
        }
        if (ok && !borderline) {
            auto xs = std::make_shared<TargetVector>(x);
            return detail::make_approximant(xs, w, q);
        }
        if (borderline) blocked = true;
    }
    if (blocked)
        throw precision_limited("no_solution_found: borderline Dirichlet candidate undecided at P");
    throw internal_error("Dirichlet solve exhausted 1..Q with exact decisions; theorem violated");
}

/// Strict-improvement record sequence: q_1 = 1, q_{n+1} minimal with a strictly
/// smaller weighted error; stops at q_max or at error exactly 0.
inline BestSequence best_sequence(const TargetVector& x, const Weight& w, std::int64_t q_max) {
    if (q_max < 1) throw input_error("q_max must be positive");
    detail::BestSeqEngine eng(x, w, q_max);
    const std::vector<SeqEntry>& recs = eng.run();
    BestSequence out;
    out.q_max = q_max;
    out.terminated = eng.terminated();
    auto xs = std::make_shared<TargetVector>(x);
    for (const SeqEntry& e : recs) {
        Approximant a{e.q, e.p, QuasiNormValue(detail::error_profile(xs, w, e.q, e.dist),
                                               x.precision_bits())};
        out.entries.push_back(std::move(a));
    }
    return out;
}

enum class EstimateOutcome { ok, terminated_rational, insufficient_data };

inline const char* to_string(EstimateOutcome o) {
    switch (o) {
        case EstimateOutcome::ok: return "ok";
        case EstimateOutcome::terminated_rational: return "terminated_rational";
        default: return "insufficient_data";
    }
}

struct GapExponent {
    std::int64_t q = 0, q_next = 0; // q_next = 0 for per-entry (ordinary) rows
    double log_err = 0;
    double exponent = 0;
    bool in_window = false;
};

struct ExponentEstimate {
    EstimateOutcome outcome = EstimateOutcome::insufficient_data;
    double value = 0;
    std::vector<GapExponent> gaps;
    std::int64_t q_max = 0;
    double tail_fraction = 0;
    int tail_min = 0;
};

namespace detail {

inline size_t window_size(size_t count, double fraction, int minimum) {
    size_t w = static_cast<size_t>(std::ceil(fraction * static_cast<double>(count)));
    if (w < static_cast<size_t>(minimum)) w = static_cast<size_t>(minimum);
    if (w > count) w = count;
    return w;
}

inline ExponentEstimate exponent_estimate_impl(const TargetVector& x, const Weight& w,
                                               std::int64_t q_max, const EstimatorConfig& cfg,
                                               bool uniform) {
    BestSeqEngine eng(x, w, q_max);
    const std::vector<SeqEntry>& recs = eng.run();
    ExponentEstimate est;
    est.q_max = q_max;
    est.tail_fraction = cfg.tail_fraction;
    est.tail_min = cfg.tail_min;
    if (eng.terminated()) {
        est.outcome = EstimateOutcome::terminated_rational;
        return est;
    }
    if (recs.size() < 4) {
        est.outcome = EstimateOutcome::insufficient_data;
        return est;
    }
    if (uniform) {
        for (size_t i = 0; i + 1 < recs.size(); ++i) {
            double le = log_err_of(recs[i], w);
            double e = -le / std::log(static_cast<double>(recs[i + 1].q));
            est.gaps.push_back(GapExponent{recs[i].q, recs[i + 1].q, le, e, false});
        }
    } else {
        for (const SeqEntry& r : recs) {
            if (r.q < 2) continue;
            double le = log_err_of(r, w);
            double e = -le / std::log(static_cast<double>(r.q));
            est.gaps.push_back(GapExponent{r.q, 0, le, e, false});
        }
    }
    if (est.gaps.size() < static_cast<size_t>(cfg.tail_min)) {
        est.outcome = EstimateOutcome::insufficient_data;
        return est;
    }
    size_t win = window_size(est.gaps.size(), cfg.tail_fraction, cfg.tail_min);
    bool first = true;
    for (size_t i = est.gaps.size() - win; i < est.gaps.size(); ++i) {
        est.gaps[i].in_window = true;
        double e = est.gaps[i].exponent;
        if (first) { est.value = e; first = false; }
        else if (uniform ? e < est.value : e > est.value) est.value = e;
    }
    est.outcome = EstimateOutcome::ok;
    return est;
}

} // namespace detail

/// Finite-scale surrogate of the uniform exponent: min over the tail window of
/// -log(err_n)/log(q_{n+1}) across closed gaps of the best sequence.
inline ExponentEstimate uniform_exponent_estimate(const TargetVector& x, const Weight& w,
                                                  std::int64_t q_max,
                                                  const EstimatorConfig& cfg = {}) {
    return detail::exponent_estimate_impl(x, w, q_max, cfg, true);
}

/// Finite-scale surrogate of the ordinary exponent: max over the tail window
/// of -log(err_n)/log(q_n) across entries.
inline ExponentEstimate ordinary_exponent_estimate(const TargetVector& x, const Weight& w,
                                                   std::int64_t q_max,
                                                   const EstimatorConfig& cfg = {}) {
    return detail::exponent_estimate_impl(x, w, q_max, cfg, false);
}

} // namespace wdio
