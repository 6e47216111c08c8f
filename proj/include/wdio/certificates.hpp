// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "wdio/approx.hpp"

namespace wdio {

struct CertWitness {
    std::int64_t Q = 0;
    int w_index = 0;
    std::int64_t q = 0;
    std::vector<Int> p;
};

struct CertFailure {
    std::int64_t Q = 0;
    int w_index = 0;
};

/// Report of a (delta- or epsilon-) singularity search up to a finite scale.
/// Success at scale Q_max is evidence, never proof, of the asymptotic property.
struct CertificateReport {
    enum class Kind { delta_singular, epsilon_singular };
    Kind kind = Kind::delta_singular;
    Rat delta;    // threshold delta/Q   (delta_singular)
    Rat epsilon;  // threshold Q^-eps    (epsilon_singular)
    std::int64_t q_max = 0;
    std::optional<std::int64_t> Q0;        // minimal Q0: all Q in (Q0, q_max] succeed
    std::vector<CertWitness> witnesses;    // capped, evenly spread over successful Q
    std::vector<CertFailure> failures;     // capped
    std::uint64_t failure_count = 0;
    std::uint64_t success_count = 0;
    size_t witness_cap = 0, failure_cap = 0;
};

namespace detail {

struct WeightScanData {
    std::unique_ptr<BestSeqEngine> engine;
    const std::vector<SeqEntry>* records = nullptr;
    bool terminated = false;
    std::vector<double> log_err; // per record; NaN when zero
};

inline std::vector<WeightScanData> scan_all_weights(const TargetVector& x, const WeightSet& W,
                                                    std::int64_t q_max) {
    std::vector<WeightScanData> out;
    out.reserve(W.size());
    for (size_t wi = 0; wi < W.size(); ++wi) {
        WeightScanData d;
        d.engine = std::make_unique<BestSeqEngine>(x, W[wi], q_max);
        d.records = &d.engine->run();
        d.terminated = d.engine->terminated();
        d.log_err.reserve(d.records->size());
        for (size_t r = 0; r < d.records->size(); ++r) {
            bool zero = d.terminated && r + 1 == d.records->size();
            d.log_err.push_back(zero ? std::nan("") : log_err_of((*d.records)[r], W[wi]));
        }
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace detail

namespace detail {

/// Runs a per-coordinate threshold test against a record, refining the stored
/// distances through the engine when an interval is too coarse to decide.
/// term_test(mag, ni) returns lt/eq (pass), gt (fail), unknown (refine).
template <typename TermTest>
bool test_record_terms(const BestSeqEngine& eng, const SeqEntry& rec, const Weight& w,
                       TermTest&& term_test, const char* what) {
    for (int i = 0; i < w.dim(); ++i) {
        std::int64_t ni = w.numerator_of(i);
        if (ni == 0) continue;
        Mag mg = rec.dist[static_cast<size_t>(i)];
        Cmp c = term_test(mg, ni);
        int s = mg.kind == Mag::Kind::dyadic ? mg.scale : eng.scale_cap();
        while (c == Cmp::unknown && s < eng.scale_cap()) {
            s = std::min(s * 2, eng.scale_cap());
            mg = eng.refine_dist(rec, i, s);
            c = term_test(mg, ni);
        }
        if (c == Cmp::unknown) throw precision_limited(what);
        if (c == Cmp::gt) return false;
    }
    return true;
}

/// Shared certificate walk. threshold_test(engine, record, w_index, Q) decides
/// err <= threshold(Q) exactly; log_threshold(Q) gives a double log-threshold
/// used only to pick the most binding witness per successful Q.
template <typename ThresholdTest, typename LogThreshold>
CertificateReport certificate_walk(const TargetVector& x, const WeightSet& W, std::int64_t q_max,
                                   ThresholdTest&& threshold_test, LogThreshold&& log_threshold,
                                   CertificateReport base, size_t witness_cap, size_t failure_cap) {
    if (x.dim() != W.dim()) throw input_error("dimension mismatch");
    if (q_max < 1) throw input_error("Q_max must be positive");
    CertificateReport rep = std::move(base);
    rep.q_max = q_max;
    rep.witness_cap = witness_cap;
    rep.failure_cap = failure_cap;

    std::vector<WeightScanData> scans = scan_all_weights(x, W, q_max);
    std::vector<size_t> rec_idx(W.size(), 0);

    std::int64_t last_fail = 0;
    std::vector<CertWitness> all_success; // one binding witness per successful Q (capped later)
    for (std::int64_t Q = 1; Q <= q_max; ++Q) {
        bool all_ok = true;
        double worst_margin = 0;
        int worst_w = -1;
        for (size_t wi = 0; wi < W.size(); ++wi) {
            const auto& recs = *scans[wi].records;
            size_t& ri = rec_idx[wi];
            while (ri + 1 < recs.size() && recs[ri + 1].q <= Q) ++ri;
            const SeqEntry& rec = recs[ri];
            bool zero = std::isnan(scans[wi].log_err[ri]);
            bool ok = zero ? true : threshold_test(*scans[wi].engine, rec, wi, Q);
            if (!ok) {
                all_ok = false;
                if (rep.failures.size() < failure_cap)
                    rep.failures.push_back(CertFailure{Q, static_cast<int>(wi)});
                ++rep.failure_count;
            } else if (all_ok) {
                double margin = zero ? 1e18 : (log_threshold(Q) - scans[wi].log_err[ri]);
                if (worst_w < 0 || margin < worst_margin) { worst_margin = margin; worst_w = static_cast<int>(wi); }
            }
        }
        if (all_ok) {
            ++rep.success_count;
            const auto& recs = *scans[static_cast<size_t>(worst_w)].records;
            const SeqEntry& rec = recs[rec_idx[static_cast<size_t>(worst_w)]];
            all_success.push_back(CertWitness{Q, worst_w, rec.q, rec.p});
        } else {
            last_fail = Q;
        }
    }
    if (last_fail == q_max) rep.Q0.reset();
    else rep.Q0 = last_fail;

    // keep an evenly spread subset of witnesses (always the first and last)
    if (!all_success.empty()) {
        if (all_success.size() <= witness_cap) rep.witnesses = std::move(all_success);
        else {
            size_t n = all_success.size();
            for (size_t k = 0; k < witness_cap; ++k) {
                size_t idx = (k * (n - 1)) / (witness_cap - 1);
                rep.witnesses.push_back(all_success[idx]);
            }
        }
    }
    return rep;
}

} // namespace detail

/// Searches for the minimal Q0 <= Q_max with: for all Q in (Q0, Q_max] and all
/// w in W there is (p, q), 0 < q <= Q, with ||q x - p||_w <= delta / Q.
inline CertificateReport singular_certificate(const TargetVector& x, const WeightSet& W,
                                              const Rat& delta, std::int64_t q_max,
                                              size_t witness_cap = 256, size_t failure_cap = 1000) {
    if (delta <= 0) throw input_error("delta must be positive");
    CertificateReport base;
    base.kind = CertificateReport::Kind::delta_singular;
    base.delta = delta;
    const double log_delta = log_rat(delta);
    auto test = [&](const detail::BestSeqEngine& eng, const SeqEntry& rec, size_t wi,
                    std::int64_t Q) {
        const Weight& w = W[wi];
        Rat thr = delta / Q;
        std::int64_t m = w.common_den();
        const double log_thr = log_delta - std::log(static_cast<double>(Q));
        return detail::test_record_terms(
            eng, rec, w,
            [&](const Mag& mg, std::int64_t ni) {
                if (mg.is_exact_zero()) return Cmp::lt;
                // sound double prefilter: term <= thr  <=>  m*log(dist) <= ni*log(thr)
                double llo, lhi;
                mag_log_bounds(mg, llo, lhi);
                double tol = 1e-6 * static_cast<double>(m);
                double rhs = static_cast<double>(ni) * log_thr;
                if (static_cast<double>(m) * lhi - rhs < -tol) return Cmp::lt;
                if (static_cast<double>(m) * llo - rhs > tol) return Cmp::gt;
                return cmp_term_threshold(mg, ni, m, thr);
            },
            "certificate threshold undecided at precision cap");
    };
    auto logthr = [&](std::int64_t Q) { return log_delta - std::log(static_cast<double>(Q)); };
    return detail::certificate_walk(x, W, q_max, test, logthr, std::move(base), witness_cap, failure_cap);
}

/// Same with threshold 1/Q^eps for rational eps >= 1 (exact via integer powers).
inline CertificateReport epsilon_singular_certificate(const TargetVector& x, const WeightSet& W,
                                                      const Rat& epsilon, std::int64_t q_max,
                                                      size_t witness_cap = 256,
                                                      size_t failure_cap = 1000) {
    if (epsilon < 1) throw input_error("epsilon must be >= 1");
    std::int64_t u = to_i64(numerator(epsilon)), v = to_i64(denominator(epsilon));
    CertificateReport base;
    base.kind = CertificateReport::Kind::epsilon_singular;
    base.epsilon = epsilon;
    const double eps_d = to_double(epsilon);
    auto test = [&](const detail::BestSeqEngine& eng, const SeqEntry& rec, size_t wi,
                    std::int64_t Q) {
        const Weight& w = W[wi];
        std::int64_t m = w.common_den();
        const double lq = std::log(static_cast<double>(Q));
        return detail::test_record_terms(
            eng, rec, w,
            [&](const Mag& mg, std::int64_t ni) {
                if (mg.is_exact_zero()) return Cmp::lt;
                // sound double prefilter on the interval bounds before exact powers
                double llo, lhi;
                mag_log_bounds(mg, llo, lhi);
                double tol = 1e-6 * static_cast<double>(m);
                double en = eps_d * static_cast<double>(ni) * lq;
                if (static_cast<double>(m) * lhi + en < -tol) return Cmp::lt;
                if (static_cast<double>(m) * llo + en > tol) return Cmp::gt;
                return cmp_term_pow_threshold(mg, ni, m, Q, u, v);
            },
            "epsilon certificate threshold undecided at precision cap");
    };
    auto logthr = [&](std::int64_t Q) { return -eps_d * std::log(static_cast<double>(Q)); };
    return detail::certificate_walk(x, W, q_max, test, logthr, std::move(base), witness_cap, failure_cap);
}

struct SigmaHatGridPoint {
    std::int64_t Q = 0;
    double eps = 0;      // min over W of -log(minerr_w(Q)) / log(Q)
    int w_index = -1;    // achieving weight
    bool infinite = false;
    bool in_window = false;
};

struct SigmaHatEstimate {
    EstimateOutcome outcome = EstimateOutcome::insufficient_data;
    double value = 0;
    std::vector<SigmaHatGridPoint> grid;
    std::int64_t q_max = 0;
};

/// Finite-scale surrogate of the W-uniform exponent (Definition-style): on a
/// geometric Q grid, eps(Q) = min over w of -log(best error at scale Q)/log Q;
/// the estimate is the min of eps(Q) over the tail window.
inline SigmaHatEstimate sigma_hat_estimate(const TargetVector& x, const WeightSet& W,
                                           std::int64_t q_max, const EstimatorConfig& cfg = {}) {
    if (x.dim() != W.dim()) throw input_error("dimension mismatch");
    SigmaHatEstimate est;
    est.q_max = q_max;
    std::vector<detail::WeightScanData> scans = detail::scan_all_weights(x, W, q_max);

    std::vector<std::int64_t> grid;
    double qd = static_cast<double>(cfg.grid_start);
    while (true) {
        std::int64_t Q = static_cast<std::int64_t>(std::floor(qd));
        if (Q > q_max) break;
        if (grid.empty() || Q > grid.back()) grid.push_back(Q);
        qd *= cfg.grid_ratio;
    }
    if (grid.empty() || grid.back() < q_max) grid.push_back(q_max);

    std::vector<size_t> rec_idx(W.size(), 0);
    for (std::int64_t Q : grid) {
        SigmaHatGridPoint pt;
        pt.Q = Q;
        bool have = false, all_inf = true;
        for (size_t wi = 0; wi < W.size(); ++wi) {
            const auto& recs = *scans[wi].records;
            size_t& ri = rec_idx[wi];
            while (ri + 1 < recs.size() && recs[ri + 1].q <= Q) ++ri;
            if (recs[ri].q > Q) continue; // grid below the first record cannot happen (q=1 always)
            if (std::isnan(scans[wi].log_err[ri])) continue; // err 0: eps infinite for this w
            all_inf = false;
            double e = -scans[wi].log_err[ri] / std::log(static_cast<double>(Q));
            if (!have || e < pt.eps) { pt.eps = e; pt.w_index = static_cast<int>(wi); have = true; }
        }
        pt.infinite = all_inf;
        est.grid.push_back(pt);
    }

    size_t finite_tail = 0;
    for (const SigmaHatGridPoint& p : est.grid)
        if (!p.infinite) ++finite_tail;
    if (est.grid.empty() || est.grid.back().infinite) {
        est.outcome = EstimateOutcome::terminated_rational;
        return est;
    }
    if (finite_tail < static_cast<size_t>(cfg.grid_tail_min)) {
        est.outcome = EstimateOutcome::insufficient_data;
        return est;
    }
    size_t win = detail::window_size(est.grid.size(), cfg.tail_fraction, cfg.grid_tail_min);
    bool first = true;
    for (size_t i = est.grid.size() - win; i < est.grid.size(); ++i) {
        est.grid[i].in_window = true;
        if (est.grid[i].infinite) continue;
        if (first || est.grid[i].eps < est.value) { est.value = est.grid[i].eps; first = false; }
    }
    if (first) {
        est.outcome = EstimateOutcome::terminated_rational;
        return est;
    }
    est.outcome = EstimateOutcome::ok;
    return est;
}

} // namespace wdio
