// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "wdio/certificates.hpp"

namespace wdio {

/// The lattice a_{w,t} u_x Z^(d+1), represented implicitly by (x, w, t).
/// a_{w,t} = exp diag(w_1 t, ..., w_d t, -t); u_x is the upper-triangular
/// unipotent with x in the last column. Determinant 1 by construction.
struct FlowPoint {
    TargetVector x;
    Weight w;
    double t = 0;
};

struct DeltaResult {
    double value = 0;
    std::int64_t q = 0; // 0 means the achieving vector lies in the q = 0 stratum
};

namespace detail {

inline void check_budget(double t, std::int64_t budget) {
    if (std::ceil(std::exp(t)) > static_cast<double>(budget))
        throw scale_overflow("ceil(e^t) = " + std::to_string(std::ceil(std::exp(t))) +
                             " exceeds enumeration budget " + std::to_string(budget));
}

} // namespace detail

/// Sup-norm length of a shortest nonzero vector of a_{w,t} u_x Z^(d+1).
/// Stratified enumeration: the q = 0 stratum contributes e^(w_min t) via a unit
/// vector; each q >= 1 stratum contributes max(max_i e^(w_i t)|q x_i - p_i|,
/// e^-t q) at the nearest integer vector. Vectors with e^-t q above the current
/// minimum cannot win, which bounds the scan.
inline DeltaResult delta(const FlowPoint& fp, std::int64_t enum_budget = (std::int64_t(1) << 25)) {
    if (fp.t < 0) throw input_error("flow time must be non-negative");
    if (fp.x.dim() != fp.w.dim()) throw input_error("dimension mismatch");
    detail::check_budget(fp.t, enum_budget);
    const int d = fp.x.dim();
    std::vector<double> xd = fp.x.to_doubles();
    std::vector<double> ew(static_cast<size_t>(d));
    double wmin = 1;
    for (int i = 0; i < d; ++i) {
        double wi = to_double(fp.w.entry(i));
        ew[static_cast<size_t>(i)] = std::exp(wi * fp.t);
        if (wi < wmin) wmin = wi;
    }
    const double emt = std::exp(-fp.t);
    DeltaResult best{std::exp(wmin * fp.t), 0};
    for (std::int64_t q = 1;; ++q) {
        double tail = emt * static_cast<double>(q);
        if (tail >= best.value) break;
        if (q > enum_budget)
            throw scale_overflow("delta enumeration exceeded budget at q = " + std::to_string(q));
        double v = tail;
        for (int i = 0; i < d; ++i) {
            double y = static_cast<double>(q) * xd[static_cast<size_t>(i)];
            double dist = std::fabs(y - std::nearbyint(y));
            double c = ew[static_cast<size_t>(i)] * dist;
            if (c > v) v = c;
        }
        if (v < best.value) best = DeltaResult{v, q};
    }
    return best;
}

/// Quasi-norm variant of delta for a single weight (same flow a_{w,t}, vector
/// length measured by max(max_i |v_i|^(1/w_i), |v_last|)). Zero-weight
/// coordinates use the limit convention; components e^(w_i t)|q x_i - p_i| with
/// w_i = 0 stay below 1 and contribute 0.
inline DeltaResult delta_quasi(const FlowPoint& fp, std::int64_t enum_budget = (std::int64_t(1) << 25)) {
    if (fp.t < 0) throw input_error("flow time must be non-negative");
    detail::check_budget(fp.t, enum_budget);
    const int d = fp.x.dim();
    std::vector<double> xd = fp.x.to_doubles();
    std::vector<double> wd(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) wd[static_cast<size_t>(i)] = to_double(fp.w.entry(i));
    const double emt = std::exp(-fp.t);
    const double et = std::exp(fp.t);
    // q = 0 stratum: unit vectors give (e^(w_i t))^(1/w_i) = e^t for every i
    DeltaResult best{et, 0};
    for (std::int64_t q = 1;; ++q) {
        double tail = emt * static_cast<double>(q);
        if (tail >= best.value) break;
        if (q > enum_budget)
            throw scale_overflow("delta_quasi enumeration exceeded budget at q = " + std::to_string(q));
        double v = tail;
        for (int i = 0; i < d; ++i) {
            double y = static_cast<double>(q) * xd[static_cast<size_t>(i)];
            double dist = std::fabs(y - std::nearbyint(y));
            double wi = wd[static_cast<size_t>(i)];
            double c;
            if (wi == 0) c = 0; // |component| <= 1/2 < 1 under the limit convention
            else c = et * std::pow(dist, 1.0 / wi); // (e^{w_i t} dist)^{1/w_i} = e^t dist^{1/w_i}
            if (c > v) v = c;
        }
        if (v < best.value) best = DeltaResult{v, q};
    }
    return best;
}

/// delta_W of Remark-4.7 type: standard-weight flow a_{(1/d,...,1/d),t} with
/// length inf over w in W of the w-quasi-norm.
inline DeltaResult delta_W(const TargetVector& x, const WeightSet& W, double t,
                           std::int64_t enum_budget = (std::int64_t(1) << 25)) {
    if (t < 0) throw input_error("flow time must be non-negative");
    if (x.dim() != W.dim()) throw input_error("dimension mismatch");
    detail::check_budget(t, enum_budget);
    const int d = x.dim();
    std::vector<double> xd = x.to_doubles();
    const double etd = std::exp(t / d);
    const double emt = std::exp(-t);
    // q = 0 stratum: unit vector e_i under weight w costs (e^{t/d})^(1/w_i);
    // the cheapest choice over i and w is e^(t / (d * w_max)).
    double wmax = to_double(W.w_max());
    DeltaResult best{std::exp(t / (d * wmax)), 0};
    std::vector<std::vector<double>> inv(W.size());
    for (size_t wi = 0; wi < W.size(); ++wi) {
        inv[wi].resize(static_cast<size_t>(d));
        for (int i = 0; i < d; ++i) {
            double e = to_double(W[wi].entry(i));
            inv[wi][static_cast<size_t>(i)] = e == 0 ? 0 : 1.0 / e;
        }
    }
    for (std::int64_t q = 1;; ++q) {
        double tail = emt * static_cast<double>(q);
        if (tail >= best.value) break;
        if (q > enum_budget)
            throw scale_overflow("delta_W enumeration exceeded budget at q = " + std::to_string(q));
        double vmin = -1;
        for (size_t wi = 0; wi < W.size(); ++wi) {
            double v = tail;
            for (int i = 0; i < d; ++i) {
                double y = static_cast<double>(q) * xd[static_cast<size_t>(i)];
                double dist = std::fabs(y - std::nearbyint(y));
                double iw = inv[wi][static_cast<size_t>(i)];
                double c = iw == 0 ? 0 : std::pow(etd * dist, iw);
                if (c > v) v = c;
            }
            if (vmin < 0 || v < vmin) vmin = v;
        }
        if (vmin < best.value) best = DeltaResult{vmin, q};
    }
    return best;
}

struct RateSample {
    double t = 0;
    int w_index = 0; // weight achieving the inf of the rate (i.e. the largest delta)
    double delta = 0;
    double rate = 0; // (-1/t) log delta
};

/// Sampled divergence-rate trace of inf_w (-1/t) log delta(a_{w,t} u_x Z^{d+1}).
struct RateTrace {
    std::vector<RateSample> samples;
    double tail_estimate = 0;
    bool has_estimate = false;
    double t_max = 0, t_step = 0;
    double tail_fraction = 0;
};

struct FlowConfig {
    double t_step = 0.25;
    double tail_fraction = 0.25; // last 25% of samples
    std::int64_t enum_budget = (std::int64_t(1) << 25);
    bool quasi = false; // use the w-quasi-norm delta variant per weight
};

/// Finite-scale surrogate of the liminf divergence rate tau_hat_W.
inline RateTrace tau_hat_estimate(const TargetVector& x, const WeightSet& W, double t_max,
                                  const FlowConfig& cfg = {}) {
    if (t_max <= 0) throw input_error("t_max must be positive");
    if (x.dim() != W.dim()) throw input_error("dimension mismatch");
    RateTrace tr;
    tr.t_max = t_max;
    tr.t_step = cfg.t_step;
    tr.tail_fraction = cfg.tail_fraction;
    for (double t = cfg.t_step; t <= t_max + 1e-12; t += cfg.t_step) {
        double dmax = -1;
        int widx = 0;
        for (size_t wi = 0; wi < W.size(); ++wi) {
            FlowPoint fp{x, W[wi], t};
            DeltaResult r = cfg.quasi ? delta_quasi(fp, cfg.enum_budget) : delta(fp, cfg.enum_budget);
            if (r.value > dmax) { dmax = r.value; widx = static_cast<int>(wi); }
        }
        RateSample s;
        s.t = t;
        s.w_index = widx;
        s.delta = dmax;
        s.rate = -std::log(dmax) / t;
        tr.samples.push_back(s);
    }
    if (!tr.samples.empty()) {
        size_t win = detail::window_size(tr.samples.size(), cfg.tail_fraction, 1);
        bool first = true;
        for (size_t i = tr.samples.size() - win; i < tr.samples.size(); ++i) {
            if (first || tr.samples[i].rate < tr.tail_estimate) tr.tail_estimate = tr.samples[i].rate;
            first = false;
        }
        tr.has_estimate = true;
    }
    return tr;
}

struct SandwichVerdict {
    bool decidable = false;
    std::string blocked_reason;
    double tau_est = 0, sigma_est = 0;
    double lower = 0, upper = 0;
    bool pass_lower = false, pass_upper = false;
    double slack = 0;
};

/// Checks the two-sided bound (tau+w_max)/((1-tau) w_max) <= sigma_hat <=
/// (tau+w_min)/((1-tau) w_min) on finite-scale estimates, each side relaxed by
/// `slack`.
inline SandwichVerdict verify_sandwich(const TargetVector& x, const WeightSet& W,
                                       std::int64_t q_max, double t_max, double slack,
                                       const EstimatorConfig& ecfg = {}, const FlowConfig& fcfg = {}) {
    SandwichVerdict v;
    v.slack = slack;
    SigmaHatEstimate sh = sigma_hat_estimate(x, W, q_max, ecfg);
    if (sh.outcome != EstimateOutcome::ok) {
        v.blocked_reason = std::string("sigma_hat estimate: ") + to_string(sh.outcome);
        return v;
    }
    RateTrace tr = tau_hat_estimate(x, W, t_max, fcfg);
    if (!tr.has_estimate) {
        v.blocked_reason = "empty rate trace";
        return v;
    }
    v.tau_est = tr.tail_estimate;
    v.sigma_est = sh.value;
    if (v.tau_est >= 1 - slack) {
        v.blocked_reason = "tau estimate too close to 1 (rational-like collapse)";
        return v;
    }
    double wmin = to_double(W.w_min()), wmax = to_double(W.w_max());
    if (wmin <= 0) {
        v.blocked_reason = "w_min = 0: bounds degenerate";
        return v;
    }
    v.lower = (v.tau_est + wmax) / ((1 - v.tau_est) * wmax);
    v.upper = (v.tau_est + wmin) / ((1 - v.tau_est) * wmin);
    v.pass_lower = v.lower <= v.sigma_est + slack;
    v.pass_upper = v.sigma_est <= v.upper + slack;
    v.decidable = true;
    return v;
}

struct EqualityVerdict {
    bool decidable = false;
    std::string blocked_reason;
    double tau_est = 0, sigma_est = 0, predicted = 0;
    bool pass = false;
    double slack = 0;
};

/// Single-weight identity sigma_hat = (1 + tau_hat)/(1 - tau_hat) with the
/// quasi-norm delta variant.
inline EqualityVerdict single_weight_equality_check(const TargetVector& x, const Weight& w,
                                                    std::int64_t q_max, double t_max, double slack,
                                                    const EstimatorConfig& ecfg = {},
                                                    FlowConfig fcfg = {}) {
    EqualityVerdict v;
    v.slack = slack;
    WeightSet W({w});
    SigmaHatEstimate sh = sigma_hat_estimate(x, W, q_max, ecfg);
    if (sh.outcome != EstimateOutcome::ok) {
        v.blocked_reason = std::string("sigma_hat estimate: ") + to_string(sh.outcome);
        return v;
    }
    fcfg.quasi = true;
    RateTrace tr = tau_hat_estimate(x, W, t_max, fcfg);
    if (!tr.has_estimate) {
        v.blocked_reason = "empty rate trace";
        return v;
    }
    v.tau_est = tr.tail_estimate;
    v.sigma_est = sh.value;
    if (v.tau_est >= 1 - slack) {
        v.blocked_reason = "tau estimate too close to 1 (rational-like collapse)";
        return v;
    }
    v.predicted = (1 + v.tau_est) / (1 - v.tau_est);
    v.pass = std::fabs(v.sigma_est - v.predicted) <= slack;
    v.decidable = true;
    return v;
}

struct DaniCheckRow {
    std::int64_t Q = 0;
    int w_index = 0;
    double t = 0;
    double delta_val = 0;
    double threshold = 0;
    bool ok = false;
};

/// Cross-module consistency: a delta-certificate witness at scale Q yields,
/// at time t = log(Q / sqrt(delta)), a lattice vector of sup-norm at most
/// (sqrt delta)^(w_min). (The change of variables e^t = Q / delta~ with
/// delta~ = sqrt(delta) makes the bound rigorous at finite scale.)
inline std::vector<DaniCheckRow> dani_divergence_check(const TargetVector& x, const WeightSet& W,
                                                       const CertificateReport& cert,
                                                       size_t max_rows = 16,
                                                       std::int64_t enum_budget = (std::int64_t(1) << 25)) {
    if (cert.kind != CertificateReport::Kind::delta_singular)
        throw input_error("dani check needs a delta-singularity certificate");
    std::vector<DaniCheckRow> rows;
    double sd = std::sqrt(to_double(cert.delta));
    double wmin = to_double(W.w_min());
    double thr = std::pow(sd, wmin);
    size_t stridex = cert.witnesses.size() > max_rows ? cert.witnesses.size() / max_rows : 1;
    for (size_t k = 0; k < cert.witnesses.size(); k += stridex) {
        const CertWitness& wit = cert.witnesses[k];
        DaniCheckRow row;
        row.Q = wit.Q;
        row.w_index = wit.w_index;
        row.t = std::log(static_cast<double>(wit.Q) / sd);
        if (row.t <= 0) continue;
        FlowPoint fp{x, W[static_cast<size_t>(wit.w_index)], row.t};
        row.delta_val = delta(fp, enum_budget).value;
        row.threshold = thr;
        row.ok = row.delta_val <= thr * (1 + 1e-9);
        rows.push_back(row);
        if (rows.size() >= max_rows) break;
    }
    return rows;
}

} // namespace wdio
