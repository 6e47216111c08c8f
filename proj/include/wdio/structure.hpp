// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "wdio/certificates.hpp"
#include "wdio/polynomial.hpp"

namespace wdio {

/// Full integer solution set of a X - b Y = c: (x0 + n b/g, y0 + n a/g),
/// canonical base 0 <= x0 < |b|/g when b != 0.
struct SolutionFamily {
    Int x0, y0;
    Int step_x, step_y; // (b/g, a/g)
    Int g;
};

namespace detail {

/// Extended Euclid: returns g = gcd(a,b) >= 0 with a*u + b*v = g.
inline void ext_gcd(Int a, Int b, Int& g, Int& u, Int& v) {
    Int u0 = 1, v0 = 0, u1 = 0, v1 = 1;
    while (b != 0) {
        Int q = a / b;
        Int t = a - q * b; a = b; b = t;
        t = u0 - q * u1; u0 = u1; u1 = t;
        t = v0 - q * v1; v0 = v1; v1 = t;
    }
    if (a < 0) { a = -a; u0 = -u0; v0 = -v0; }
    g = a; u = u0; v = v0;
}

} // namespace detail

/// Solves a X - b Y = c over the integers; empty when gcd(a,b) does not
/// divide c. Requires (a, b) != (0, 0).
inline std::optional<SolutionFamily> solve_linear_diophantine(const Int& a, const Int& b, const Int& c) {
    if (a == 0 && b == 0) throw input_error("(a, b) must not both be zero");
    Int g, u, v;
    detail::ext_gcd(a, b, g, u, v); // a u + b v = g
    if (c % g != 0) return std::nullopt;
    Int scale = c / g;
    Int X = u * scale, Y = -v * scale; // a X - b Y = c
    SolutionFamily fam;
    fam.g = g;
    fam.step_x = b / g;
    fam.step_y = a / g;
    if (b != 0) {
        Int sx = abs(fam.step_x);
        Int x0 = mod_floor(X, sx);
        Int n = (X - x0) / fam.step_x; // exact; shift back to the canonical base
        fam.x0 = x0;
        fam.y0 = Y - n * fam.step_y;
    } else {
        fam.x0 = X;
        fam.y0 = 0;
    }
    return fam;
}

/// sigma_1 = (sigma_2^2 - sigma_2/2) / (1 - sigma_2) on (3/4, 1); strictly
/// above sigma_2 there, with fixed point 3/4 at the boundary.
inline Rat exponent_relation_check(const Rat& sigma2) {
    if (!(sigma2 > Rat(3, 4) && sigma2 < 1))
        throw input_error("sigma_2 must lie in (3/4, 1)");
    Rat sigma1 = (sigma2 * sigma2 - sigma2 / 2) / (1 - sigma2);
    if (!(sigma1 > sigma2)) throw internal_error("exponent relation lost monotonicity");
    return sigma1;
}

/// One analyzed gap (n, n+1) of a sup-norm best-approximation sequence.
struct PairRow {
    size_t n_index = 0; // position of q_n in the sequence
    std::int64_t q = 0, q_next = 0;
    Int r;              // gcd(q, q_next)
    Int xn, yn;         // xn q_next - yn q = r, 0 <= xn < q/r
    std::vector<Int> p_n, p_next; // the two approximation vectors
    std::vector<Int> c; // c_i = p_{n,i} q_next - p_{n+1,i} q
    std::vector<Int> l; // l_i = c_i / r
    std::vector<Int> k; // p_{n,i} = l_i xn + k_i q/r
    bool eq81_ok = false;      // |c_i| < 2 q_next^(1-delta), exact
    bool ratio_defined = false;
    Rat a_ratio, b_ratio;      // p_{n,2} = a p_{n,1} + b q_n for this gap
};

enum class PairCase { stable, jump, undecided };

inline const char* to_string(PairCase c) {
    switch (c) {
        case PairCase::stable: return "stable";
        case PairCase::jump: return "jump";
        default: return "undecided";
    }
}

struct JumpEvent {
    size_t row_index = 0;        // row whose (a, b) differs from the previous
    Rat determined_fraction;     // p_{n,1}/q_n forced by the two reconstructions
    bool identity_ok = false;    // determined fraction matches p_{n,1}/q_n exactly
    bool side_condition = false; // gcd(p_{n,1}, q_n) < sqrt(q_n)
    bool growth_ok = false;      // q_{n+1} > q_n^((delta-1/2)/(1-delta))
    bool err_bound_ok = false;   // err_n < q_n^(-(delta^2-delta/2)/(1-delta))
};

struct PairAnalysis {
    std::vector<PairRow> rows; // selected gaps only
    PairCase classification = PairCase::undecided;
    std::optional<std::pair<Rat, Rat>> recovered; // (a, b) when stable
    std::vector<JumpEvent> jumps;
    std::int64_t q_max = 0;
    Rat delta;
    size_t sequence_length = 0;
    bool terminated = false;
};

namespace detail {

/// Strict test  max_i dist_i < Q^(-u/v)  on a record (exact via integer and
/// quadratic-field powers), with refinement through the engine for dyadic
/// distances.
inline bool sup_err_below_pow(const BestSeqEngine& eng, const SeqEntry& rec, std::int64_t Q,
                              std::int64_t u, std::int64_t v) {
    for (size_t i = 0; i < rec.dist.size(); ++i) {
        Mag mg = rec.dist[i];
        auto test = [&](const Mag& m) {
            if (m.is_exact_zero()) return Cmp::lt;
            return cmp_term_pow_threshold(m, 1, 1, Q, u, v); // dist^v * Q^u vs 1
        };
        Cmp c = test(mg);
        int s = mg.kind == Mag::Kind::dyadic ? mg.scale : eng.scale_cap();
        while (c == Cmp::unknown && s < eng.scale_cap()) {
            s = std::min(s * 2, eng.scale_cap());
            mg = eng.refine_dist(rec, static_cast<int>(i), s);
            c = test(mg);
        }
        if (c == Cmp::unknown) throw precision_limited("gap selection test undecided at cap");
        if (c != Cmp::lt) return false;
    }
    return true;
}

} // namespace detail

/// The gcd decomposition of consecutive best approximations in the plane, with
/// the stable/jump case split. delta must be a rational in (3/4, 1); gaps are
/// selected by the strict bound err_n < q_{n+1}^(-delta).
inline PairAnalysis consecutive_pair_analysis(const TargetVector& x, const Rat& delta,
                                              std::int64_t q_max, int stable_run = 3) {
    if (x.dim() != 2) throw input_error("pair analysis is defined for d = 2");
    if (!(delta > Rat(3, 4) && delta < 1)) throw input_error("delta must lie in (3/4, 1)");
    const std::int64_t u = to_i64(numerator(delta)), v = to_i64(denominator(delta));
    Weight sup_weight(std::vector<Rat>{Rat(1, 2), Rat(1, 2)}); // same records as the sup norm
    detail::BestSeqEngine eng(x, sup_weight, q_max);
    const std::vector<SeqEntry>& recs = eng.run();

    PairAnalysis an;
    an.q_max = q_max;
    an.delta = delta;
    an.sequence_length = recs.size();
    an.terminated = eng.terminated();

    for (size_t n = 0; n + 1 < recs.size(); ++n) {
        if (!detail::sup_err_below_pow(eng, recs[n], recs[n + 1].q, u, v)) continue;
        const SeqEntry& a = recs[n];
        const SeqEntry& b = recs[n + 1];
        PairRow row;
        row.n_index = n;
        row.q = a.q;
        row.q_next = b.q;
        Int g, xu, xv;
        detail::ext_gcd(Int(b.q), Int(a.q), g, xu, xv); // b.q * xu + a.q * xv = g
        row.r = g;
        auto fam = solve_linear_diophantine(Int(b.q), Int(a.q), g);
        if (!fam) throw internal_error("gcd does not divide itself");
        row.xn = fam->x0;
        row.yn = fam->y0;
        row.p_n = a.p;
        row.p_next = b.p;
        // per-coordinate decomposition
        bool eq81 = true;
        for (int i = 0; i < 2; ++i) {
            Int ci = a.p[static_cast<size_t>(i)] * b.q - b.p[static_cast<size_t>(i)] * a.q;
            if (ci % row.r != 0)
                throw internal_error("c_i not divisible by gcd(q_n, q_{n+1})");
            Int li = ci / row.r;
            Int num = a.p[static_cast<size_t>(i)] - li * row.xn;
            Int den = Int(a.q) / row.r;
            if (num % den != 0)
                throw internal_error("k_i reconstruction is non-integral");
            Int ki = num / den;
            // exact reconstruction identities
            if (a.p[static_cast<size_t>(i)] != li * row.xn + ki * (Int(a.q) / row.r))
                throw internal_error("p_n reconstruction failed");
            if (b.p[static_cast<size_t>(i)] != li * row.yn + ki * (Int(b.q) / row.r))
                throw internal_error("p_{n+1} reconstruction failed");
            // Eq-(8.1)-style bound |c_i| < 2 q_{n+1}^(1-delta):
            // |c_i|^v < 2^v q_{n+1}^(v-u), exact in integers
            Int lhs = int_pow(abs(ci), static_cast<unsigned long>(v));
            Int rhs = (Int(1) << static_cast<unsigned long>(v)) *
                      int_pow(Int(b.q), static_cast<unsigned long>(v - u));
            if (lhs >= rhs) eq81 = false;
            row.c.push_back(std::move(ci));
            row.l.push_back(std::move(li));
            row.k.push_back(std::move(ki));
        }
        row.eq81_ok = eq81;
        if (row.l[0] != 0) {
            row.ratio_defined = true;
            Int an = row.l[1], ad = row.l[0];
            if (ad < 0) { ad = -ad; an = -an; }
            row.a_ratio = Rat(an, ad);
            row.b_ratio = (Rat(row.k[1]) - row.a_ratio * Rat(row.k[0])) / Rat(row.r);
        }
        an.rows.push_back(std::move(row));
    }

    // classification over rows that are adjacent in the sequence
    size_t run = 0;
    for (size_t i = 0; i < an.rows.size(); ++i) {
        const PairRow& cur = an.rows[i];
        bool adjacent = i > 0 && an.rows[i - 1].n_index + 1 == cur.n_index;
        bool matched = false;
        if (adjacent && cur.ratio_defined && an.rows[i - 1].ratio_defined) {
            if (cur.a_ratio == an.rows[i - 1].a_ratio && cur.b_ratio == an.rows[i - 1].b_ratio) {
                matched = true;
            } else if (cur.a_ratio != an.rows[i - 1].a_ratio) {
                // the two reconstructions of p_{n,2} pin down p_{n,1}/q_n
                JumpEvent ev;
                ev.row_index = i;
                ev.determined_fraction =
                    (an.rows[i - 1].b_ratio - cur.b_ratio) / (cur.a_ratio - an.rows[i - 1].a_ratio);
                // identity check against the actual record
                const SeqEntry& rec = eng.records()[cur.n_index];
                ev.identity_ok = ev.determined_fraction == Rat(rec.p[0], Int(rec.q));
                Int gg = boost::multiprecision::gcd(abs(rec.p[0]), Int(rec.q));
                ev.side_condition = gg * gg < Int(rec.q);
                // q_{n+1} > q_n^((delta-1/2)/(1-delta)):
                //   q_{n+1}^(2(v-u)) > q_n^(2u-v)
                Int lq = int_pow(Int(cur.q_next), static_cast<unsigned long>(2 * (v - u)));
                Int rq = int_pow(Int(cur.q), static_cast<unsigned long>(2 * u - v));
                ev.growth_ok = lq > rq;
                // err_n < q_n^(-u(2u-v) / (2v(v-u))):
                //   dist^(2v(v-u)) q_n^(u(2u-v)) < den^(2v(v-u)) per coordinate
                ev.err_bound_ok = detail::sup_err_below_pow(
                    eng, rec, cur.q, u * (2 * u - v), 2 * v * (v - u));
                an.jumps.push_back(ev);
            }
        }
        run = matched ? run + 1 : 1;
        if (i + 1 == an.rows.size() && cur.ratio_defined && run >= static_cast<size_t>(stable_run)) {
            an.classification = PairCase::stable;
            an.recovered = std::make_pair(cur.a_ratio, cur.b_ratio);
        }
    }
    if (an.classification != PairCase::stable)
        an.classification = an.jumps.empty() ? PairCase::undecided : PairCase::jump;
    return an;
}

/// A point with rational head and badly-approximable irrational tail lying on
/// the rational hyperplane stack, with its predicted epsilon-singularity
/// exponent (1 - sum of the first i weight entries)^(-1).
struct HyperplanePoint {
    TargetVector x;
    Rat predicted_eps;
};

inline const std::vector<Rat>& quadratic_tail_radicands() {
    static const std::vector<Rat> r{Rat(2), Rat(3), Rat(5), Rat(6), Rat(7), Rat(10), Rat(11), Rat(13)};
    return r;
}

inline HyperplanePoint hyperplane_point(const Weight& w, int i, const std::vector<Rat>& head,
                                        int tail_seed = 0) {
    const int d = w.dim();
    if (i < 1 || i > d - 1) throw input_error("head length must be in [1, d-1]");
    if (static_cast<int>(head.size()) != i) throw input_error("head size must equal i");
    Rat s(0);
    for (int j = 0; j < i; ++j) s += w.entry(j);
    if (s >= 1) throw input_error("degenerate weight head: first entries sum to 1");
    std::vector<Coordinate> coords;
    for (const Rat& h : head) coords.emplace_back(h);
    for (int j = i; j < d; ++j) {
        const auto& rads = quadratic_tail_radicands();
        Rat rad = rads[static_cast<size_t>(tail_seed + j - i) % rads.size()];
        CReal root = make_sqrt(rad);
        // shift into (0, 1): sqrt(rad) - floor(sqrt(rad))
        Int fl = boost::multiprecision::sqrt(numerator(rad)); // rad integral here
        coords.emplace_back(make_affine(Rat(1), root, Rat(-fl)));
    }
    HyperplanePoint hp{TargetVector(std::move(coords)), 1 / (1 - s)};
    return hp;
}

/// d = 1 vector from a partial-quotient rule, with classical oracle exponents
/// attached: sigma from the tail growth of log q_{n+1} / log q_n, sigma_hat = 1
/// for any irrational.
struct CFVector {
    TargetVector x;
    double sigma_hint = 1;
    double sigma_hat_hint = 1;
};

inline CFVector continued_fraction_vector(const detail::CFNode::Rule& rule, const std::string& name,
                                          int terms = 48) {
    CReal r = make_cf(rule, name);
    // oracle: convergent denominators from the same rule
    Int q0 = 0, q1 = 1;
    std::vector<double> logs;
    for (int n = 1; n <= terms; ++n) {
        Int a = rule(n, q1, q0);
        Int q2 = a * q1 + q0;
        q0 = q1; q1 = q2;
        logs.push_back(log_int(q1));
        if (logs.size() > 2 && logs.back() > 700) break; // q beyond e^700: enough data
    }
    double sig = 1;
    for (size_t i = logs.size() / 2; i + 1 < logs.size(); ++i)
        if (logs[i] > 0 && logs[i + 1] / logs[i] > sig) sig = logs[i + 1] / logs[i];
    CFVector out{TargetVector({Coordinate(r)}), sig, 1.0};
    return out;
}

struct ProbeStats {
    std::vector<double> values;
    double median = 0, min = 0, max = 0;
    size_t ok_count = 0, degenerate_count = 0;
};

struct InheritanceProbeReport {
    bool containment_ok = false;
    ProbeStats subspace_stats, curve_stats;
    std::int64_t q_max = 0;
    size_t sample_count = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline void finalize_stats(ProbeStats& s) {
    if (s.values.empty()) return;
    std::vector<double> v = s.values;
    std::sort(v.begin(), v.end());
    s.min = v.front();
    s.max = v.back();
    s.median = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

} // namespace detail

/// Samples sigma_hat estimates on a subspace and on a curve inside it; the
/// parameters are pseudo-random rationals with ~40-bit denominators, which act
/// generically at every scale the estimator can reach.
inline InheritanceProbeReport inheritance_probe(const PolyMap& subspace, const PolyMap& curve,
                                                const WeightSet& W, std::int64_t q_max,
                                                size_t sample_count, std::uint64_t seed,
                                                const EstimatorConfig& cfg = {}) {
    InheritanceProbeReport rep;
    rep.q_max = q_max;
    rep.sample_count = sample_count;
    rep.seed = seed;
    rep.containment_ok = curve_in_subspace(subspace, curve);
    if (!rep.containment_ok) throw input_error("curve image is not contained in the subspace");
    if (subspace.range_dim() != W.dim()) throw input_error("weight dimension mismatch");
    std::mt19937_64 rng(seed);
    auto random_param = [&rng]() {
        std::uniform_int_distribution<std::int64_t> num(1, (std::int64_t(1) << 40) - 1);
        return Rat(num(rng), Int(1) << 40);
    };
    auto sample_map = [&](const PolyMap& pm, ProbeStats& stats) {
        for (size_t s = 0; s < sample_count; ++s) {
            std::vector<Coordinate> params;
            for (int j = 0; j < pm.domain_dim(); ++j) params.emplace_back(random_param());
            TargetVector pt(pm.eval(params));
            SigmaHatEstimate est = sigma_hat_estimate(pt, W, q_max, cfg);
            if (est.outcome == EstimateOutcome::ok) {
                stats.values.push_back(est.value);
                ++stats.ok_count;
            } else {
                ++stats.degenerate_count;
            }
        }
        detail::finalize_stats(stats);
    };
    sample_map(subspace, rep.subspace_stats);
    sample_map(curve, rep.curve_stats);
    return rep;
}

} // namespace wdio
