// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <wdio/wdio.hpp>

using namespace wdio;

TEST_CASE("rational points carry delta-singularity certificates") {
    TargetVector x = parse_target_vector("1/2,1/3");
    WeightSet W = grid_weights(2, 8);
    auto rep = singular_certificate(x, W, Rat(1, 10), 1000);
    REQUIRE(rep.Q0.has_value());
    CHECK(*rep.Q0 <= 8);
    CHECK(rep.failure_count >= 1);
    CHECK(rep.success_count >= static_cast<std::uint64_t>(1000 - *rep.Q0));
}

TEST_CASE("badly approximable numbers refuse delta certificates") {
    TargetVector g = parse_target_vector("golden");
    WeightSet W({parse_weight("1")});
    auto rep = singular_certificate(g, W, Rat(1, 10), 100000);
    CHECK_FALSE(rep.Q0.has_value()); // the failure list is nonempty beyond any candidate Q0
    CHECK(rep.failure_count > 90000);
}

TEST_CASE("weights loaded toward a badly approximable coordinate fail") {
    TargetVector x = parse_target_vector("sqrt(2)-1,1/3");
    WeightSet W({parse_weight("19/20,1/20"), parse_weight("39/40,1/40")});
    auto rep = singular_certificate(x, W, Rat(1, 10), 10000);
    CHECK_FALSE(rep.Q0.has_value());
    CHECK(rep.failure_count > 0);
    bool fail_w0 = false, fail_w1 = false;
    for (const auto& f : rep.failures) {
        fail_w0 |= (f.w_index == 0);
        fail_w1 |= (f.w_index == 1);
    }
    CHECK(fail_w0);
    CHECK(fail_w1);
}

TEST_CASE("delta certificate monotonicity") {
    TargetVector x = parse_target_vector("1/2,1/3");
    WeightSet W({parse_weight("1/2,1/2"), parse_weight("1/4,3/4")});
    auto tight = singular_certificate(x, W, Rat(1, 10), 500);
    auto loose = singular_certificate(x, W, Rat(1, 5), 500);
    REQUIRE(tight.Q0.has_value());
    REQUIRE(loose.Q0.has_value());
    CHECK(*loose.Q0 <= *tight.Q0);
}

TEST_CASE("epsilon certificates") {
    // rational-head hyperplane point: epsilon = 1.8 succeeds at finite scale
    TargetVector x = parse_target_vector("1/3,sqrt(2)-1");
    WeightSet W({parse_weight("1/2,1/2")});
    auto rep = epsilon_singular_certificate(x, W, Rat(9, 5), 100000);
    CHECK(rep.Q0.has_value());

    // epsilon = 1 always succeeds with Q0 <= 1 (weighted Dirichlet)
    auto triv = epsilon_singular_certificate(parse_target_vector("golden,1/7"),
                                             WeightSet({parse_weight("1/2,1/2")}), Rat(1), 2000);
    REQUIRE(triv.Q0.has_value());
    CHECK(*triv.Q0 <= 1);

    // golden ratio: epsilon = 1.2 fails
    auto bad = epsilon_singular_certificate(parse_target_vector("golden"), WeightSet({parse_weight("1")}),
                                            Rat(6, 5), 100000);
    CHECK_FALSE(bad.Q0.has_value());
}

TEST_CASE("epsilon certificate monotonicity") {
    TargetVector x = parse_target_vector("1/3,sqrt(2)-1");
    WeightSet W({parse_weight("1/2,1/2")});
    auto strong = epsilon_singular_certificate(x, W, Rat(9, 5), 20000);
    auto weak = epsilon_singular_certificate(x, W, Rat(3, 2), 20000);
    REQUIRE(strong.Q0.has_value());
    REQUIRE(weak.Q0.has_value());
    CHECK(*weak.Q0 <= *strong.Q0);
}

TEST_CASE("certificate witnesses re-verify from the serialized report") {
    RunConfig cfg;
    TargetVector x = parse_target_vector("1/2,1/3");
    WeightSet W = grid_weights(2, 8);
    auto rep = singular_certificate(x, W, Rat(1, 10), 400);
    Json j = certificate_json(rep, x, W, cfg);
    CHECK(validate_certificate_report(j));

    TargetVector y = parse_target_vector("1/3,sqrt(2)-1");
    WeightSet Wy({parse_weight("1/2,1/2")});
    auto eps = epsilon_singular_certificate(y, Wy, Rat(9, 5), 20000);
    Json je = certificate_json(eps, y, Wy, cfg);
    CHECK(validate_certificate_report(je));

    // a corrupted witness must fail re-validation
    Json bad = j;
    bad["payload"]["witnesses"][0]["q"] = 1;
    bad["payload"]["witnesses"][0]["p"] = Json::array({"7", "7"});
    CHECK_FALSE(validate_certificate_report(bad));
}

TEST_CASE("a W-certificate restricts to singleton certificates") {
    TargetVector x = parse_target_vector("1/2,1/3");
    std::vector<Weight> ws{parse_weight("1/2,1/2"), parse_weight("1/8,7/8")};
    auto joint = singular_certificate(x, WeightSet(ws), Rat(1, 10), 500);
    REQUIRE(joint.Q0.has_value());
    for (const Weight& w : ws) {
        auto single = singular_certificate(x, WeightSet({w}), Rat(1, 10), 500);
        REQUIRE(single.Q0.has_value());
        CHECK(*single.Q0 <= *joint.Q0);
    }
}

TEST_CASE("sigma_hat estimate agrees with the uniform estimate for singletons") {
    for (const char* fix : {"golden", "1/3,sqrt(2)-1"}) {
        TargetVector x = parse_target_vector(fix);
        Weight w = x.dim() == 1 ? parse_weight("1") : parse_weight("1/2,1/2");
        auto grid = sigma_hat_estimate(x, WeightSet({w}), 1000000);
        auto gaps = uniform_exponent_estimate(x, w, 1000000);
        REQUIRE(grid.outcome == EstimateOutcome::ok);
        REQUIRE(gaps.outcome == EstimateOutcome::ok);
        CHECK(std::fabs(grid.value - gaps.value) <= 0.05);
    }
}

TEST_CASE("sigma_hat respects the intersection inequality") {
    // min over a larger weight set can only drop
    TargetVector x = parse_target_vector("sqrt(2)-1,sqrt(3)-1");
    Weight w1 = parse_weight("1/2,1/2"), w2 = parse_weight("1/4,3/4");
    auto joint = sigma_hat_estimate(x, WeightSet({w1, w2}), 100000);
    auto s1 = sigma_hat_estimate(x, WeightSet({w1}), 100000);
    auto s2 = sigma_hat_estimate(x, WeightSet({w2}), 100000);
    REQUIRE(joint.outcome == EstimateOutcome::ok);
    CHECK(joint.value <= std::min(s1.value, s2.value) + 1e-9);
}

TEST_CASE("sigma_hat on rational points terminates with growing grid values") {
    auto done = sigma_hat_estimate(parse_target_vector("1/2,1/3"), WeightSet({parse_weight("1/2,1/2")}),
                                   1000);
    CHECK(done.outcome == EstimateOutcome::terminated_rational);

    auto grow = sigma_hat_estimate(parse_target_vector("1/7,5/11"), WeightSet({parse_weight("1/2,1/2")}),
                                   1000);
    CHECK(grow.outcome == EstimateOutcome::terminated_rational);
    bool has_finite = false, has_infinite = false;
    for (const auto& p : grow.grid) {
        if (p.infinite) has_infinite = true;
        else has_finite = true;
    }
    CHECK(has_finite);  // pre-termination grid values are reported
    CHECK(has_infinite); // and the error hits exactly zero once q covers the lcm
}
