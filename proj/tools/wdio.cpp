// SPDX-License-Identifier: Apache-2.0
//
// Command-line workbench: every subcommand binds one library operation family
// and emits a reproducible report (json or csv). Exit codes: 0 success,
// 2 precision_limited, 3 scale_overflow, 4 input errors.
#include <CLI11.hpp>
#include <wdio/wdio.hpp>

#include <fstream>
#include <iostream>

using namespace wdio;

namespace {

struct Out {
    std::string path;      // empty: stdout
    bool with_meta = true; // json envelope with timestamp

    void emit_json(const Json& report) const {
        std::string s = render_with_meta(report, !with_meta);
        write(s + "\n");
    }
    void emit_csv(const std::vector<std::string>& header, const std::vector<std::string>& rows) const {
        std::string s;
        for (size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
        s += "\n";
        for (const std::string& r : rows) s += r + "\n";
        write(s);
    }
    void write(const std::string& s) const {
        if (path.empty()) {
            std::cout << s;
            return;
        }
        std::ofstream f(path);
        if (!f) throw input_error("cannot open output file '" + path + "'");
        f << s;
    }
};

std::string join_p(const std::vector<Int>& p) {
    std::string s;
    for (size_t i = 0; i < p.size(); ++i) s += (i ? ";" : "") + p[i].str();
    return s;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Json approximant_payload(const Approximant& a, unsigned digits) { return approximant_json(a, digits); }

void add_common(CLI::App* cmd, RunConfig& cfg, Out& out, std::string& config_file) {
    cmd->add_option("--precision", cfg.precision_bits, "working precision in bits (default 256)");
    cmd->add_option("--format", cfg.format, "json | csv");
    cmd->add_option("--digits", cfg.digits, "significant digits in decimal payloads");
    cmd->add_option("--seed", cfg.seed, "seed for pseudo-random sampling");
    cmd->add_option("--config", config_file, "key=value config file");
    cmd->add_option("--out", out.path, "output file (default stdout)");
    cmd->add_flag_callback("--no-meta", [&out]() { out.with_meta = false; },
                           "omit the volatile metadata envelope (deterministic bytes)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted Diophantine approximation workbench"};
    app.require_subcommand(1);

    RunConfig cfg;
    try {
        cfg.load_env();
    } catch (const input_error& e) {
        std::cerr << e.what() << "\n";
        return 4;
    }
    Out out;
    std::string config_file;

    std::string xs, ws, Ws, rs, basis_s, head_s, subspace_s, curve_s, rule_s, kind_s = "uniform";
    std::string delta_s = "1/10", eps_s, sigma2_s, a_s, b_s, c_s;
    std::int64_t q_opt = 0, Q_opt = 0, i_opt = 1;
    double t_opt = 2.0, C_opt = 6.0;
    std::uint64_t samples = 9;
    bool quasi_flag = false, verify_flag = false;

    // ---- norm
    CLI::App* norm = app.add_subcommand("norm", "weighted quasi-norm of a vector");
    norm->add_option("--x", xs, "vector")->required();
    norm->add_option("--w", ws, "weight")->required();
    norm->add_option("--r", rs, "optional rational threshold for an exact <= decision");
    add_common(norm, cfg, out, config_file);

    // ---- dirichlet
    CLI::App* dir = app.add_subcommand("dirichlet", "first q <= Q with ||q x - p||_w < 1/Q");
    dir->add_option("--x", xs)->required();
    dir->add_option("--w", ws)->required();
    dir->add_option("--Q", Q_opt, "scale Q")->required();
    add_common(dir, cfg, out, config_file);

    // ---- best-seq
    CLI::App* bseq = app.add_subcommand("best-seq", "strict-improvement approximation records");
    bseq->add_option("--x", xs)->required();
    bseq->add_option("--w", ws)->required();
    bseq->add_option("--Qmax", cfg.q_max);
    add_common(bseq, cfg, out, config_file);

    // ---- exponents
    CLI::App* expo = app.add_subcommand("exponents", "uniform / ordinary / sigma-hat estimates");
    expo->add_option("--x", xs)->required();
    expo->add_option("--w", ws, "single weight (uniform/ordinary)");
    expo->add_option("--W", Ws, "weight set (sigma-hat; overrides --w)");
    expo->add_option("--which", kind_s, "uniform | ordinary | both (with --w)");
    expo->add_option("--Qmax", cfg.q_max);
    add_common(expo, cfg, out, config_file);

    // ---- singular-cert
    CLI::App* cert = app.add_subcommand("singular-cert", "delta- or epsilon-singularity certificate");
    cert->add_option("--x", xs)->required();
    cert->add_option("--W", Ws, "weight set, grid(mesh), or @file")->required();
    cert->add_option("--delta", delta_s, "rational delta (default 1/10)");
    cert->add_option("--epsilon", eps_s, "rational epsilon >= 1 (switches to the epsilon form)");
    cert->add_option("--Qmax", cfg.q_max);
    add_common(cert, cfg, out, config_file);

    // ---- flow
    CLI::App* flow = app.add_subcommand("flow", "divergence-rate trace along the weight cone");
    flow->add_option("--x", xs)->required();
    flow->add_option("--W", Ws)->required();
    flow->add_option("--tmax", cfg.t_max);
    flow->add_option("--tstep", cfg.t_step);
    flow->add_flag("--quasi", quasi_flag, "use the w-quasi-norm delta variant");
    add_common(flow, cfg, out, config_file);

    // ---- correspondence
    CLI::App* corr = app.add_subcommand("correspondence", "sandwich bounds and single-weight identity");
    corr->add_option("--x", xs)->required();
    corr->add_option("--W", Ws)->required();
    corr->add_option("--Qmax", cfg.q_max);
    corr->add_option("--tmax", cfg.t_max);
    corr->add_option("--slack", cfg.slack);
    add_common(corr, cfg, out, config_file);

    // ---- covolume
    CLI::App* cov = app.add_subcommand("covolume", "submodule covolume along the flow");
    cov->add_option("--basis", basis_s, "integer rows 'a,b,c;d,e,f'")->required();
    cov->add_option("--x", xs)->required();
    cov->add_option("--w", ws)->required();
    cov->add_option("--t", t_opt);
    cov->add_option("--C", C_opt, "comparability constant for the decomposition check");
    add_common(cov, cfg, out, config_file);

    // ---- structure
    CLI::App* structure = app.add_subcommand("structure", "integer-structure analytics");
    structure->require_subcommand(1);
    CLI::App* dio = structure->add_subcommand("diophantine", "solution family of aX - bY = c");
    dio->add_option("--a", a_s)->required();
    dio->add_option("--b", b_s)->required();
    dio->add_option("--c", c_s)->required();
    add_common(dio, cfg, out, config_file);
    CLI::App* pairs = structure->add_subcommand("pairs", "gcd decomposition of consecutive pairs");
    pairs->add_option("--x", xs)->required();
    pairs->add_option("--delta", delta_s, "rational in (3/4, 1)");
    pairs->add_option("--Qmax", cfg.q_max);
    add_common(pairs, cfg, out, config_file);
    CLI::App* rel = structure->add_subcommand("relation", "sigma_1 from sigma_2");
    rel->add_option("--sigma2", sigma2_s)->required();
    add_common(rel, cfg, out, config_file);

    // ---- construct
    CLI::App* con = app.add_subcommand("construct", "named point families");
    con->require_subcommand(1);
    CLI::App* hyp = con->add_subcommand("hyperplane", "rational head + quadratic tail point");
    hyp->add_option("--w", ws)->required();
    hyp->add_option("--i", i_opt, "length of the rational head")->required();
    hyp->add_option("--head", head_s, "comma-separated rational head")->required();
    hyp->add_flag("--verify", verify_flag, "run the epsilon certificate at predicted - 1/4");
    hyp->add_option("--Qmax", cfg.q_max);
    add_common(hyp, cfg, out, config_file);
    CLI::App* cfc = con->add_subcommand("cf", "continued-fraction vector with oracle exponents");
    cfc->add_option("--rule", rule_s, "quotient list or arith | qdouble")->required();
    cfc->add_option("--Qmax", cfg.q_max);
    add_common(cfc, cfg, out, config_file);

    // ---- probe
    CLI::App* probe = app.add_subcommand("probe", "inheritance probe: subspace vs curve samples");
    probe->add_option("--subspace", subspace_s, "affine map 's,t->...'")->required();
    probe->add_option("--curve", curve_s, "polynomial map 's->...'")->required();
    probe->add_option("--W", Ws)->required();
    probe->add_option("--Qmax", cfg.q_max);
    probe->add_option("--samples", samples);
    add_common(probe, cfg, out, config_file);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_file.empty()) cfg.load_file(config_file);
        const bool csv = cfg.format == "csv";
        if (cfg.format != "json" && cfg.format != "csv")
            throw input_error("format must be json or csv");

        if (*norm) {
            TargetVector x = parse_target_vector(xs, cfg.precision_bits);
            Weight w = parse_weight(ws);
            QuasiNormValue v = quasi_norm(x, w);
            Json j = report_skeleton("norm", cfg);
            j["inputs"]["x"] = x.spec();
            j["inputs"]["w"] = weight_json(w);
            j["payload"]["value"] = v.is_infinite() ? "inf" : v.decimal(cfg.digits);
            j["payload"]["zero"] = v.is_zero();
            j["payload"]["infinite"] = v.is_infinite();
            if (!rs.empty()) {
                Rat r = parse_rational(rs);
                j["inputs"]["r"] = rat_string(r);
                j["payload"]["leq_r"] = quasi_norm_leq(x, w, r);
            }
            if (csv) out.emit_csv({"value", "zero", "infinite"},
                                  {std::string(j["payload"]["value"].get<std::string>()) + "," +
                                   (v.is_zero() ? "1" : "0") + "," + (v.is_infinite() ? "1" : "0")});
            else out.emit_json(j);
        } else if (*dir) {
            TargetVector x = parse_target_vector(xs, cfg.precision_bits);
            Weight w = parse_weight(ws);
            Approximant a = dirichlet_solve(x, w, Q_opt);
            Json j = report_skeleton("dirichlet", cfg);
            j["inputs"]["x"] = x.spec();
            j["inputs"]["w"] = weight_json(w);
            j["inputs"]["Q"] = Q_opt;
            j["payload"] = approximant_payload(a, cfg.digits);
            if (csv) out.emit_csv({"q", "p", "err"},
                                  {std::to_string(a.q) + "," + join_p(a.p) + "," +
                                   (a.err.is_zero() ? "0" : a.err.decimal(cfg.digits))});
            else out.emit_json(j);
        } else if (*bseq) {
            TargetVector x = parse_target_vector(xs, cfg.precision_bits);
            Weight w = parse_weight(ws);
            BestSequence bs = best_sequence(x, w, cfg.q_max);
            if (csv) {
                std::vector<std::string> rows;
                for (size_t n = 0; n < bs.entries.size(); ++n) {
                    const Approximant& a = bs.entries[n];
                    rows.push_back(std::to_string(n + 1) + "," + std::to_string(a.q) + "," +
                                   join_p(a.p) + "," +
                                   (a.err.is_zero() ? "0" : a.err.decimal(cfg.digits)));
                }
                out.emit_csv({"n", "q", "p", "err"}, rows);
            } else {
                Json j = report_skeleton("best-seq", cfg);
                j["inputs"]["x"] = x.spec();
                j["inputs"]["w"] = weight_json(w);
                j["inputs"]["q_max"] = cfg.q_max;
                Json arr = Json::array();
                for (const Approximant& a : bs.entries) arr.push_back(approximant_payload(a, cfg.digits));
                j["payload"]["entries"] = arr;
                j["payload"]["terminated"] = bs.terminated;
                out.emit_json(j);
            }
        } else if (*expo) {
            TargetVector x = parse_target_vector(xs, cfg.precision_bits);
            Json j = report_skeleton("exponents", cfg);
            j["inputs"]["x"] = x.spec();
            j["inputs"]["q_max"] = cfg.q_max;
            std::vector<std::string> rows;
            if (!Ws.empty()) {
                WeightSet W = parse_weight_set(Ws, x.dim());
                auto est = sigma_hat_estimate(x, W, cfg.q_max, cfg.estimator());
                j["inputs"]["W"] = weight_set_json(W);
                j["payload"]["outcome"] = to_string(est.outcome);
                if (est.outcome == EstimateOutcome::ok) j["payload"]["sigma_hat"] = fmt(est.value);
                Json grid = Json::array();
                for (const auto& g : est.grid) {
                    Json e;
                    e["Q"] = g.Q;
                    e["eps"] = g.infinite ? "inf" : fmt(g.eps);
                    e["w_index"] = g.w_index;
                    e["in_window"] = g.in_window;
                    grid.push_back(e);
                    rows.push_back("grid," + std::to_string(g.Q) + "," +
                                   (g.infinite ? "inf" : fmt(g.eps)) + "," +
                                   std::to_string(g.w_index) + "," + (g.in_window ? "1" : "0"));
                }
                j["payload"]["grid"] = grid;
                if (csv) out.emit_csv({"row", "Q", "eps", "w_index", "in_window"}, rows);
                else out.emit_json(j);
            } else {
                if (ws.empty()) throw input_error("exponents needs --w or --W");
                Weight w = parse_weight(ws);
                j["inputs"]["w"] = weight_json(w);
                auto emit_one = [&](const char* name, const ExponentEstimate& est) {
                    Json e;
                    e["outcome"] = to_string(est.outcome);
                    if (est.outcome == EstimateOutcome::ok) e["value"] = fmt(est.value);
                    Json arr = Json::array();
                    for (const auto& g : est.gaps) {
                        Json ge;
                        ge["q"] = g.q;
                        if (g.q_next) ge["q_next"] = g.q_next;
                        ge["exponent"] = fmt(g.exponent);
                        ge["in_window"] = g.in_window;
                        arr.push_back(ge);
                        rows.push_back(std::string(name) + "," + std::to_string(g.q) + "," +
                                       std::to_string(g.q_next) + "," + fmt(g.exponent) + "," +
                                       (g.in_window ? "1" : "0"));
                    }
                    e["gaps"] = arr;
                    j["payload"][name] = e;
                };
                if (kind_s == "uniform" || kind_s == "both")
                    emit_one("uniform", uniform_exponent_estimate(x, w, cfg.q_max, cfg.estimator()));
                if (kind_s == "ordinary" || kind_s == "both")
                    emit_one("ordinary", ordinary_exponent_estimate(x, w, cfg.q_max, cfg.estimator()));
                if (csv) out.emit_csv({"row", "q", "q_next", "exponent", "in_window"}, rows);
                else out.emit_json(j);
            }
        } else if (*cert) {
            TargetVector x = parse_target_vector(xs, cfg.precision_bits);
            WeightSet W = parse_weight_set(Ws, x.dim());
            CertificateReport rep = eps_s.empty()
                ? singular_certificate(x, W, parse_rational(delta_s), cfg.q_max, cfg.witness_cap,
                                       cfg.failure_cap)
                : epsilon_singular_certificate(x, W, parse_rational(eps_s), cfg.q_max,
                                               cfg.witness_cap, cfg.failure_cap);
            Json j = certificate_json(rep, x, W, cfg);
            if (csv) {
                std::vector<std::string> rows;
                for (const auto& wt : rep.witnesses)
                    rows.push_back("witness," + std::to_string(wt.Q) + "," +
                                   std::to_string(wt.w_index) + "," + std::to_string(wt.q) + "," +
                                   join_p(wt.p));
                for (const auto& f : rep.failures)
                    rows.push_back("failure," + std::to_string(f.Q) + "," +
                                   std::to_string(f.w_index) + ",,");
                out.emit_csv({"row", "Q", "w_index", "q", "p"}, rows);
            } else out.emit_json(j);
        } else if (*flow) {
            TargetVector x = parse_target_vector(xs, cfg.precision_bits);
            WeightSet W = parse_weight_set(Ws, x.dim());
            FlowConfig fc = cfg.flow();
            fc.quasi = quasi_flag;
            RateTrace tr = tau_hat_estimate(x, W, cfg.t_max, fc);
            if (csv) {
                std::vector<std::string> rows;
                for (const auto& s : tr.samples)
                    rows.push_back(fmt(s.t) + "," + std::to_string(s.w_index) + "," + fmt(s.delta) +
                                   "," + fmt(s.rate));
                out.emit_csv({"t", "w_index", "delta", "rate"}, rows);
            } else {
                Json j = report_skeleton("flow", cfg);
                j["inputs"]["x"] = x.spec();
                j["inputs"]["W"] = weight_set_json(W);
                Json arr = Json::array();
                for (const auto& s : tr.samples) {
                    Json e;
                    e["t"] = fmt(s.t);
                    e["w_index"] = s.w_index;
                    e["delta"] = fmt(s.delta);
                    e["rate"] = fmt(s.rate);
                    arr.push_back(e);
                }
                j["payload"]["samples"] = arr;
                j["payload"]["tail_estimate"] = fmt(tr.tail_estimate);
                out.emit_json(j);
            }
        } else if (*corr) {
            TargetVector x = parse_target_vector(xs, cfg.precision_bits);
            WeightSet W = parse_weight_set(Ws, x.dim());
            SandwichVerdict v = verify_sandwich(x, W, cfg.q_max, cfg.t_max, cfg.slack,
                                                cfg.estimator(), cfg.flow());
            Json j = report_skeleton("correspondence", cfg);
            j["inputs"]["x"] = x.spec();
            j["inputs"]["W"] = weight_set_json(W);
            Json& p = j["payload"];
            p["decidable"] = v.decidable;
            if (!v.decidable) p["blocked_reason"] = v.blocked_reason;
            else {
                p["tau_est"] = fmt(v.tau_est);
                p["sigma_est"] = fmt(v.sigma_est);
                p["lower_bound"] = fmt(v.lower);
                p["upper_bound"] = fmt(v.upper);
                p["pass_lower"] = v.pass_lower;
                p["pass_upper"] = v.pass_upper;
            }
            if (W.size() == 1) {
                EqualityVerdict ev = single_weight_equality_check(x, W[0], cfg.q_max, cfg.t_max,
                                                                  cfg.slack, cfg.estimator(), cfg.flow());
                Json e;
                e["decidable"] = ev.decidable;
                if (ev.decidable) {
                    e["tau_est"] = fmt(ev.tau_est);
                    e["sigma_est"] = fmt(ev.sigma_est);
                    e["predicted_sigma"] = fmt(ev.predicted);
                    e["pass"] = ev.pass;
                } else e["blocked_reason"] = ev.blocked_reason;
                p["single_weight_identity"] = e;
            }
            if (csv) {
                out.emit_csv({"tau_est", "sigma_est", "lower", "upper", "pass_lower", "pass_upper"},
                             {v.decidable ? fmt(v.tau_est) + "," + fmt(v.sigma_est) + "," +
                                                fmt(v.lower) + "," + fmt(v.upper) + "," +
                                                std::to_string(v.pass_lower) + "," +
                                                std::to_string(v.pass_upper)
                                          : std::string(",,,,,")});
            } else out.emit_json(j);
        } else if (*cov) {
            TargetVector x = parse_target_vector(xs, cfg.precision_bits);
            Weight w = parse_weight(ws);
            IntMatrix rows_m;
            for (const std::string& row : wdio::detail::split_top_level(basis_s, ';')) {
                std::vector<Int> r;
                for (const std::string& cell : wdio::detail::split_top_level(row, ','))
                    r.push_back(numerator(parse_rational(cell)));
                rows_m.push_back(std::move(r));
            }
            SubmoduleBasis basis(rows_m);
            auto chk = covolume_decomposition_check(basis, x, w, t_opt, C_opt);
            Json j = report_skeleton("covolume", cfg);
            j["inputs"]["x"] = x.spec();
            j["inputs"]["w"] = weight_json(w);
            j["inputs"]["basis"] = basis_s;
            j["inputs"]["t"] = t_opt;
            j["inputs"]["C"] = C_opt;
            Json& p = j["payload"];
            p["covolume"] = chk.covolume.str(cfg.digits);
            p["max_expr"] = chk.max_expr.str(cfg.digits);
            p["part_err"] = chk.part_err.str(cfg.digits);
            p["part_q"] = chk.part_q.str(cfg.digits);
            p["ratio"] = fmt(chk.ratio);
            p["pass"] = chk.pass;
            p["q"] = chk.q.str();
            if (csv) out.emit_csv({"covolume", "max_expr", "ratio", "pass"},
                                  {chk.covolume.str(cfg.digits) + "," + chk.max_expr.str(cfg.digits) +
                                   "," + fmt(chk.ratio) + "," + (chk.pass ? "1" : "0")});
            else out.emit_json(j);
        } else if (*dio) {
            Int a = numerator(parse_rational(a_s)), b = numerator(parse_rational(b_s)),
                c = numerator(parse_rational(c_s));
            auto fam = solve_linear_diophantine(a, b, c);
            Json j = report_skeleton("structure-diophantine", cfg);
            j["inputs"]["a"] = a.str();
            j["inputs"]["b"] = b.str();
            j["inputs"]["c"] = c.str();
            if (fam) {
                j["payload"]["solvable"] = true;
                j["payload"]["base"] = Json::array({fam->x0.str(), fam->y0.str()});
                j["payload"]["steps"] = Json::array({fam->step_x.str(), fam->step_y.str()});
                j["payload"]["gcd"] = fam->g.str();
            } else {
                j["payload"]["solvable"] = false;
            }
            if (csv) out.emit_csv({"solvable", "x0", "y0", "step_x", "step_y", "gcd"},
                                  {fam ? "1," + fam->x0.str() + "," + fam->y0.str() + "," +
                                             fam->step_x.str() + "," + fam->step_y.str() + "," +
                                             fam->g.str()
                                       : std::string("0,,,,,")});
            else out.emit_json(j);
        } else if (*pairs) {
            TargetVector x = parse_target_vector(xs, cfg.precision_bits);
            PairAnalysis an = consecutive_pair_analysis(x, parse_rational(delta_s), cfg.q_max);
            Json j = report_skeleton("structure-pairs", cfg);
            j["inputs"]["x"] = x.spec();
            j["inputs"]["delta"] = delta_s;
            j["inputs"]["q_max"] = cfg.q_max;
            Json rows_j = Json::array();
            std::vector<std::string> rows;
            for (const auto& r : an.rows) {
                Json e;
                e["n"] = r.n_index;
                e["q"] = r.q;
                e["q_next"] = r.q_next;
                e["r"] = r.r.str();
                e["x_n"] = r.xn.str();
                e["y_n"] = r.yn.str();
                e["c"] = Json::array({r.c[0].str(), r.c[1].str()});
                e["l"] = Json::array({r.l[0].str(), r.l[1].str()});
                e["k"] = Json::array({r.k[0].str(), r.k[1].str()});
                e["eq81_ok"] = r.eq81_ok;
                if (r.ratio_defined) {
                    e["a_ratio"] = rat_string(r.a_ratio);
                    e["b_ratio"] = rat_string(r.b_ratio);
                }
                rows_j.push_back(e);
                rows.push_back(std::to_string(r.n_index) + "," + std::to_string(r.q) + "," +
                               std::to_string(r.q_next) + "," + r.r.str() + "," + r.xn.str() + "," +
                               r.yn.str() + "," + r.c[0].str() + "," + r.l[0].str() + "," +
                               r.k[0].str() + "," + r.c[1].str() + "," + r.l[1].str() + "," +
                               r.k[1].str() + "," + (r.eq81_ok ? "1" : "0"));
            }
            j["payload"]["rows"] = rows_j;
            j["payload"]["classification"] = to_string(an.classification);
            if (an.recovered) {
                j["payload"]["recovered_a"] = rat_string(an.recovered->first);
                j["payload"]["recovered_b"] = rat_string(an.recovered->second);
            }
            Json jumps = Json::array();
            for (const auto& ev : an.jumps) {
                Json e;
                e["row"] = ev.row_index;
                e["determined_fraction"] = rat_string(ev.determined_fraction);
                e["identity_ok"] = ev.identity_ok;
                e["side_condition"] = ev.side_condition;
                e["growth_ok"] = ev.growth_ok;
                e["err_bound_ok"] = ev.err_bound_ok;
                jumps.push_back(e);
            }
            j["payload"]["jumps"] = jumps;
            if (csv)
                out.emit_csv({"n", "q", "q_next", "r", "x_n", "y_n", "c1", "l1", "k1", "c2", "l2",
                              "k2", "eq81_ok"},
                             rows);
            else out.emit_json(j);
        } else if (*rel) {
            Rat s2 = parse_rational(sigma2_s);
            Rat s1 = exponent_relation_check(s2);
            Json j = report_skeleton("structure-relation", cfg);
            j["inputs"]["sigma2"] = rat_string(s2);
            j["payload"]["sigma1"] = rat_string(s1);
            j["payload"]["sigma1_decimal"] = decimal_string(s1, cfg.digits);
            if (csv) out.emit_csv({"sigma1"}, {rat_string(s1)});
            else out.emit_json(j);
        } else if (*hyp) {
            Weight w = parse_weight(ws);
            std::vector<Rat> head;
            for (const std::string& part : wdio::detail::split_top_level(head_s, ','))
                head.push_back(parse_rational(part));
            HyperplanePoint hp = hyperplane_point(w, static_cast<int>(i_opt), head,
                                                  static_cast<int>(cfg.seed));
            Json j = report_skeleton("construct-hyperplane", cfg);
            j["inputs"]["w"] = weight_json(w);
            j["inputs"]["i"] = i_opt;
            j["payload"]["x"] = hp.x.spec();
            j["payload"]["predicted_eps"] = rat_string(hp.predicted_eps);
            if (verify_flag) {
                Rat eps = hp.predicted_eps - Rat(1, 4);
                if (eps < 1) eps = Rat(1);
                auto rep = epsilon_singular_certificate(hp.x, WeightSet({w}), eps, cfg.q_max,
                                                        cfg.witness_cap, cfg.failure_cap);
                j["payload"]["verified_eps"] = rat_string(eps);
                j["payload"]["certificate_succeeded"] = rep.Q0.has_value();
                if (rep.Q0) j["payload"]["Q0"] = *rep.Q0;
            }
            out.emit_json(j);
        } else if (*cfc) {
            CFVector v = [&]() {
                if (rule_s == "arith")
                    return continued_fraction_vector(
                        [](int n, const Int&, const Int&) { return Int(n); }, "cf(arith)");
                if (rule_s == "qdouble")
                    return continued_fraction_vector(
                        [](int, const Int& q1, const Int&) { return q1 < 1 ? Int(1) : q1; },
                        "cf(qdouble)", 24);
                std::vector<Int> period;
                for (const std::string& part : wdio::detail::split_top_level(rule_s, ','))
                    period.push_back(numerator(parse_rational(part)));
                std::string name = "cf(" + rule_s + ")";
                return continued_fraction_vector(
                    [period](int n, const Int&, const Int&) {
                        return period[static_cast<size_t>(n - 1) % period.size()];
                    },
                    name);
            }();
            Json j = report_skeleton("construct-cf", cfg);
            j["inputs"]["rule"] = rule_s;
            j["payload"]["x"] = v.x.spec();
            j["payload"]["sigma_oracle"] = fmt(v.sigma_hint);
            j["payload"]["sigma_hat_oracle"] = fmt(v.sigma_hat_hint);
            out.emit_json(j);
        } else if (*probe) {
            PolyMap sub = parse_poly_map(subspace_s);
            PolyMap cur = parse_poly_map(curve_s);
            WeightSet W = parse_weight_set(Ws, sub.range_dim());
            auto rep = inheritance_probe(sub, cur, W, cfg.q_max, samples, cfg.seed, cfg.estimator());
            Json j = report_skeleton("probe", cfg);
            j["inputs"]["subspace"] = subspace_s;
            j["inputs"]["curve"] = curve_s;
            j["inputs"]["W"] = weight_set_json(W);
            j["inputs"]["samples"] = samples;
            auto stats = [&](const ProbeStats& s) {
                Json e;
                e["median"] = fmt(s.median);
                e["min"] = fmt(s.min);
                e["max"] = fmt(s.max);
                e["ok_count"] = s.ok_count;
                e["degenerate_count"] = s.degenerate_count;
                Json vals = Json::array();
                for (double v : s.values) vals.push_back(fmt(v));
                e["values"] = vals;
                return e;
            };
            j["payload"]["subspace"] = stats(rep.subspace_stats);
            j["payload"]["curve"] = stats(rep.curve_stats);
            j["payload"]["containment_ok"] = rep.containment_ok;
            if (csv) {
                std::vector<std::string> rows;
                for (size_t i = 0; i < rep.subspace_stats.values.size(); ++i)
                    rows.push_back("subspace," + std::to_string(i) + "," +
                                   fmt(rep.subspace_stats.values[i]));
                for (size_t i = 0; i < rep.curve_stats.values.size(); ++i)
                    rows.push_back("curve," + std::to_string(i) + "," + fmt(rep.curve_stats.values[i]));
                out.emit_csv({"set", "index", "sigma_hat"}, rows);
            } else out.emit_json(j);
        }
        return 0;
    } catch (const precision_limited& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const scale_overflow& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const input_error& e) {
        std::cerr << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
