// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>
#include <sstream>
#include <string>

#include "wdio/config.hpp"
#include "wdio/covolume.hpp"
#include "wdio/structure.hpp"

namespace wdio {

using Json = nlohmann::ordered_json;

inline Json config_json(const RunConfig& c) {
    Json j;
    j["precision_bits"] = c.precision_bits;
    j["q_max"] = c.q_max;
    j["t_max"] = c.t_max;
    j["t_step"] = c.t_step;
    j["tail_fraction"] = c.tail_fraction;
    j["tail_min"] = c.tail_min;
    j["grid_tail_min"] = c.grid_tail_min;
    j["grid_ratio"] = c.grid_ratio;
    j["grid_start"] = c.grid_start;
    j["t_tail_fraction"] = c.t_tail_fraction;
    j["mesh"] = rat_string(c.mesh);
    j["seed"] = c.seed;
    j["digits"] = c.digits;
    j["enum_budget"] = c.enum_budget;
    j["witness_cap"] = c.witness_cap;
    j["failure_cap"] = c.failure_cap;
    j["slack"] = c.slack;
    return j;
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline Json weight_json(const Weight& w) {
    Json a = Json::array();
    for (const Rat& e : w.entries()) a.push_back(rat_string(e));
    return a;
}

inline Json weight_set_json(const WeightSet& W) {
    Json a = Json::array();
    for (const Weight& w : W.weights()) a.push_back(weight_json(w));
    return a;
}

inline Json approximant_json(const Approximant& a, unsigned digits) {
    Json j;
    j["q"] = a.q;
    Json p = Json::array();
    for (const Int& v : a.p) p.push_back(v.str());
    j["p"] = p;
    j["err"] = a.err.is_zero() ? "0" : a.err.decimal(digits);
    j["err_zero"] = a.err.is_zero();
    return j;
}

/// Report skeleton: the primary payload is everything under "report"; the
/// envelope keeps volatile metadata (timestamp) out of the deterministic part.
inline Json report_skeleton(const std::string& kind, const RunConfig& cfg) {
    Json j;
    j["format"] = "wdio-report";
    j["version"] = 1;
    j["kind"] = kind;
    j["config"] = config_json(cfg);
    j["inputs"] = Json::object();
    j["payload"] = Json::object();
    return j;
}

inline std::string render_with_meta(const Json& report, bool deterministic_only) {
    if (deterministic_only) return report.dump(2);
    Json env;
    env["meta"]["tool"] = "wdio 1.0";
    env["meta"]["timestamp"] = []() {
        std::time_t t = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        return std::string(buf);
    }();
    env["report"] = report;
    return env.dump(2);
}

inline Json certificate_json(const CertificateReport& c, const TargetVector& x, const WeightSet& W,
                             const RunConfig& cfg) {
    Json j = report_skeleton(c.kind == CertificateReport::Kind::delta_singular ? "singular-cert"
                                                                               : "epsilon-singular-cert",
                             cfg);
    j["inputs"]["x"] = x.spec();
    j["inputs"]["W"] = weight_set_json(W);
    if (c.kind == CertificateReport::Kind::delta_singular) j["inputs"]["delta"] = rat_string(c.delta);
    else j["inputs"]["epsilon"] = rat_string(c.epsilon);
    j["inputs"]["q_max"] = c.q_max;
    Json& p = j["payload"];
    p["succeeded"] = c.Q0.has_value();
    if (c.Q0) p["Q0"] = *c.Q0;
    p["success_count"] = c.success_count;
    p["failure_count"] = c.failure_count;
    Json ws = Json::array();
    for (const CertWitness& w : c.witnesses) {
        Json e;
        e["Q"] = w.Q;
        e["w_index"] = w.w_index;
        e["q"] = w.q;
        Json pp = Json::array();
        for (const Int& v : w.p) pp.push_back(v.str());
        e["p"] = pp;
        ws.push_back(e);
    }
    p["witnesses"] = ws;
    Json fs = Json::array();
    for (const CertFailure& f : c.failures) {
        Json e;
        e["Q"] = f.Q;
        e["w_index"] = f.w_index;
        fs.push_back(e);
    }
    p["failures"] = fs;
    return j;
}

/// Re-checks every embedded witness of a certificate report with
/// quasi_norm_leq on freshly parsed inputs; no scan results are reused.
inline bool validate_certificate_report(const Json& j) {
    const Json& in = j.at("inputs");
    unsigned prec = j.at("config").at("precision_bits").get<unsigned>();
    TargetVector x = parse_target_vector(in.at("x").get<std::string>(), prec);
    std::vector<Weight> ws;
    for (const Json& wj : in.at("W")) {
        std::vector<Rat> entries;
        for (const Json& e : wj) entries.push_back(parse_rational(e.get<std::string>()));
        ws.emplace_back(Weight(std::move(entries)));
    }
    WeightSet W(std::move(ws));
    const bool is_delta = j.at("kind") == "singular-cert";
    Rat delta, eps;
    if (is_delta) delta = parse_rational(in.at("delta").get<std::string>());
    else eps = parse_rational(in.at("epsilon").get<std::string>());
    for (const Json& wit : j.at("payload").at("witnesses")) {
        std::int64_t Q = wit.at("Q").get<std::int64_t>();
        std::int64_t q = wit.at("q").get<std::int64_t>();
        const Weight& w = W[static_cast<size_t>(wit.at("w_index").get<int>())];
        if (q < 1 || q > Q) return false;
        // y = q x - p, coordinate-wise
        std::vector<Coordinate> ycoords;
        size_t i = 0;
        for (const Json& pj : wit.at("p")) {
            Rat pi(Int(pj.get<std::string>()));
            const Coordinate& c = x.coord(static_cast<int>(i++));
            if (c.is_rational()) ycoords.emplace_back(Rat(q) * c.rational() - pi);
            else ycoords.emplace_back(make_affine(Rat(q), c.real(), -pi));
        }
        TargetVector y(std::move(ycoords), x.precision_bits());
        Rat thr = is_delta ? Rat(delta / Q) : Rat(0);
        if (is_delta) {
            if (!quasi_norm_leq(y, w, thr)) return false;
        } else {
            // threshold Q^-eps: compare exactly via the profile power test
            std::int64_t u = to_i64(numerator(eps)), v = to_i64(denominator(eps));
            NormProfile prof = detail::profile_of_vector(y, w);
            for (;;) {
                bool undecided = false;
                bool okall = true;
                for (const NormTerm& t : prof.terms) {
                    Cmp c = cmp_term_pow_threshold(t.mag, t.n, prof.m, Q, u, v);
                    if (c == Cmp::gt) { okall = false; break; }
                    if (c == Cmp::unknown) undecided = true;
                }
                if (!okall) return false;
                if (!undecided) break;
                if (!prof.remake || prof.cur_scale >= prof.scale_cap) return false;
                detail::refine_profile(prof, std::min(prof.cur_scale * 2, prof.scale_cap));
            }
        }
    }
    return true;
}

} // namespace wdio
