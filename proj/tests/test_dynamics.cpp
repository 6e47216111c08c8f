// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <wdio/wdio.hpp>

#include "oracle.hpp"

using namespace wdio;

TEST_CASE("delta worked values") {
    // rational point: the vector (0, 2 e^-t) wins once e^t >= 2
    auto d1 = delta(FlowPoint{parse_target_vector("1/2"), parse_weight("1"), 2.0});
    CHECK(d1.q == 2);
    CHECK(std::fabs(d1.value - 2 * std::exp(-2.0)) < 1e-12);

    // t = 0: the unit vector e_1 caps delta at 1
    for (const char* spec : {"1/2", "golden", "sqrt(2)-1"}) {
        auto d = delta(FlowPoint{parse_target_vector(spec), parse_weight("1"), 0.0});
        CHECK(d.value <= 1.0 + 1e-12);
    }

    auto d3 = delta(FlowPoint{parse_target_vector("sqrt(2)-1"), parse_weight("1"), 3.0});
    CHECK(d3.value >= 0.25);
    CHECK(d3.value <= 0.75);
}

TEST_CASE("delta equals the brute-force enumeration for t <= 8") {
    struct Fix { const char* x; const char* w; };
    for (const Fix& f : {Fix{"sqrt(2)-1", "1"}, Fix{"golden", "1"}, Fix{"1/2,1/3", "1/2,1/2"},
                         Fix{"1/3,sqrt(2)-1", "1/2,1/2"}, Fix{"sqrt(2)-1,sqrt(3)-1", "1/4,3/4"}}) {
        TargetVector x = parse_target_vector(f.x);
        Weight w = parse_weight(f.w);
        std::vector<double> wd;
        for (const Rat& e : w.entries()) wd.push_back(to_double(e));
        for (double t : {0.5, 2.0, 4.5, 6.0, 8.0}) {
            double lib = delta(FlowPoint{x, w, t}).value;
            double brute = oracle::delta_brute(x.to_doubles(), wd, t);
            INFO(f.x << " t=" << t);
            CHECK(std::fabs(lib - brute) <= 1e-9 * std::max(1.0, brute));
        }
    }
}

TEST_CASE("Minkowski bound: delta never exceeds 1") {
    for (const char* spec : {"1/2", "golden", "1/3,sqrt(2)-1", "sqrt(2)-1,sqrt(3)-1"}) {
        TargetVector x = parse_target_vector(spec);
        Weight w = x.dim() == 1 ? parse_weight("1") : parse_weight("1/3,2/3");
        for (double t : {0.0, 1.0, 3.0, 7.0, 10.0, 13.0}) {
            CHECK(delta(FlowPoint{x, w, t}).value <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("rational collapse: delta <= den * e^-t") {
    TargetVector x = parse_target_vector("1/3,2/5"); // common denominator 15
    Weight w = parse_weight("1/2,1/2");
    for (double t : {1.0, 4.0, 8.0, 12.0})
        CHECK(delta(FlowPoint{x, w, t}).value <= 15 * std::exp(-t) * (1 + 1e-12));
}

TEST_CASE("scale overflow guards the enumeration budget") {
    CHECK_THROWS_AS(delta(FlowPoint{parse_target_vector("golden"), parse_weight("1"), 30.0}),
                    scale_overflow);
}

TEST_CASE("rate samples never exceed 1") {
    auto tr = tau_hat_estimate(parse_target_vector("1/3,sqrt(2)-1"), parse_weight_set("1/2,1/2"), 10.0);
    for (const auto& s : tr.samples) CHECK(s.rate <= 1.0 + 1e-9);
}

TEST_CASE("tau estimates: rational vs badly approximable") {
    auto rat = tau_hat_estimate(parse_target_vector("1/2"), parse_weight_set("1"), 15.0);
    CHECK(rat.tail_estimate >= 0.9);
    CHECK(rat.tail_estimate <= 1.0);

    auto gold = tau_hat_estimate(parse_target_vector("golden"), parse_weight_set("1"), 15.0);
    CHECK(gold.tail_estimate <= 0.05);
}

TEST_CASE("delta_W worked values") {
    // singleton standard weight in d = 1 is the sup-norm delta exactly
    for (double t : {0.5, 2.0, 5.0}) {
        double a = delta_W(parse_target_vector("sqrt(2)-1"), parse_weight_set("1"), t).value;
        double b = delta(FlowPoint{parse_target_vector("sqrt(2)-1"), parse_weight("1"), t}).value;
        CHECK(std::fabs(a - b) < 1e-12);
    }
    // t = 0: unit vector has every quasi-norm <= 1
    CHECK(delta_W(parse_target_vector("1/2,1/3"), parse_weight_set("1/2,1/2;1/4,3/4"), 0.0).value <=
          1.0 + 1e-12);
    // exhaustive check at t = ln 6: the q = 2 and q = 4 strata give 2/3
    double v = delta_W(parse_target_vector("1/2,1/3"), parse_weight_set("1/2,1/2"), std::log(6.0)).value;
    CHECK(std::fabs(v - 2.0 / 3.0) < 1e-9);
}

TEST_CASE("sandwich verdicts") {
    // golden ratio: tau ~ 0, both bounds ~ 1
    auto gold = verify_sandwich(parse_target_vector("golden"), parse_weight_set("1"), 1000000, 15.0, 0.1);
    REQUIRE(gold.decidable);
    CHECK(gold.pass_lower);
    CHECK(gold.pass_upper);

    // equal weights pinch the two bounds together (w_min = w_max)
    auto hyp = verify_sandwich(parse_target_vector("1/3,sqrt(2)-1"), parse_weight_set("1/2,1/2"),
                               100000, 12.0, 0.15);
    REQUIRE(hyp.decidable);
    CHECK(std::fabs(hyp.lower - hyp.upper) < 1e-12);
    CHECK(hyp.pass_lower);
    CHECK(hyp.pass_upper);

    // rational collapse trips the precondition
    auto rat = verify_sandwich(parse_target_vector("1/2"), parse_weight_set("1"), 1000, 12.0, 0.1);
    CHECK_FALSE(rat.decidable);
}

TEST_CASE("single-weight equality of Remark-4.7 type") {
    auto gold = single_weight_equality_check(parse_target_vector("golden"), parse_weight("1"),
                                             1000000, 15.0, 0.1);
    REQUIRE(gold.decidable);
    CHECK(gold.pass);

    auto hyp = single_weight_equality_check(parse_target_vector("1/3,sqrt(2)-1"),
                                            parse_weight("1/2,1/2"), 100000, 14.0, 0.15);
    REQUIRE(hyp.decidable);
    CHECK(hyp.pass);
    CHECK(hyp.tau_est > 0.15); // sigma ~ 2 forces tau ~ (sigma-1)/(sigma+1) ~ 1/3

    auto rat = single_weight_equality_check(parse_target_vector("1/2"), parse_weight("1"), 1000, 12.0, 0.1);
    CHECK_FALSE(rat.decidable);
}

TEST_CASE("certificate witnesses land below the Mahler threshold along the flow") {
    TargetVector x = parse_target_vector("1/2,1/3");
    WeightSet W = grid_weights(2, 8);
    auto cert = singular_certificate(x, W, Rat(1, 10), 1000);
    REQUIRE(cert.Q0.has_value());
    auto rows = dani_divergence_check(x, W, cert, 12);
    REQUIRE_FALSE(rows.empty());
    for (const auto& r : rows) {
        INFO("Q=" << r.Q << " delta=" << r.delta_val << " thr=" << r.threshold);
        CHECK(r.ok);
    }
}
