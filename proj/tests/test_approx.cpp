// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <wdio/wdio.hpp>

#include "oracle.hpp"

using namespace wdio;

namespace {

std::vector<oracle::Coord> oracle_coords(const std::vector<std::string>& specs) {
    std::vector<oracle::Coord> out;
    for (const std::string& s : specs) {
        if (s == "sqrt2-1")
            out.push_back(oracle::Coord::real([](int k) { return oracle::sqrt_shift(Int(2), Rat(-1), k); }));
        else if (s == "sqrt3-1")
            out.push_back(oracle::Coord::real([](int k) { return oracle::sqrt_shift(Int(3), Rat(-1), k); }));
        else if (s == "golden")
            out.push_back(oracle::Coord::real([](int k) {
                oracle::Interval iv = oracle::sqrt_shift(Int(5), Rat(-1), k + 2);
                return oracle::Interval{iv.lo / 2, iv.hi / 2};
            }));
        else
            out.push_back(oracle::Coord::rational(parse_rational(s)));
    }
    return out;
}

TargetVector lib_vector(const std::vector<std::string>& specs) {
    std::string joined;
    for (size_t i = 0; i < specs.size(); ++i) {
        std::string s = specs[i];
        if (s == "sqrt2-1") s = "sqrt(2)-1";
        if (s == "sqrt3-1") s = "sqrt(3)-1";
        joined += (i ? "," : "") + s;
    }
    return parse_target_vector(joined);
}

} // namespace

TEST_CASE("min_error worked values") {
    auto a1 = min_error(parse_target_vector("1/3"), parse_weight("1"), 3);
    CHECK(a1.p[0] == 1);
    CHECK(a1.err.is_zero());

    auto a2 = min_error(parse_target_vector("1/3,1/5"), parse_weight("1/2,1/2"), 2);
    CHECK(a2.p[0] == 1);
    CHECK(a2.p[1] == 0);
    CHECK(a2.err.approx() == Rat(4, 25)); // max((1/3)^2, (2/5)^2)

    auto a3 = min_error(parse_target_vector("sqrt(2)-1"), parse_weight("1"), 5);
    CHECK(a3.p[0] == 2); // convergent 2/5 of sqrt(2)-1
    CHECK(std::fabs(a3.err.to_double() - 0.0710678) < 1e-6);
}

TEST_CASE("nearest-integer ties round down") {
    auto a = min_error(parse_target_vector("1/2"), parse_weight("1"), 1);
    CHECK(a.p[0] == 0);
    auto b = min_error(parse_target_vector("3/2"), parse_weight("1"), 1);
    CHECK(b.p[0] == 1);
    auto c = min_error(parse_target_vector("-1/2"), parse_weight("1"), 1);
    CHECK(c.p[0] == -1);
}

TEST_CASE("dirichlet_solve worked values") {
    auto a1 = dirichlet_solve(parse_target_vector("1/3"), parse_weight("1"), 3);
    CHECK(a1.q == 3);
    CHECK(a1.err.is_zero());

    auto a2 = dirichlet_solve(parse_target_vector("sqrt(2)-1"), parse_weight("1"), 5);
    CHECK(a2.q == 2);
    CHECK(a2.p[0] == 1);
    CHECK(std::fabs(a2.err.to_double() - 0.1716) < 1e-3);

    // first success in scan order; q = 6 already satisfies err = 1/25 < 1/15
    auto a3 = dirichlet_solve(parse_target_vector("1/3,1/5"), parse_weight("1/2,1/2"), 15);
    CHECK(a3.q == 6);
    CHECK(a3.err.lt(Rat(1, 15)));
}

TEST_CASE("dirichlet totality on random rational inputs") {
    std::mt19937_64 rng(23);
    for (int iter = 0; iter < 60; ++iter) {
        int d = 1 + static_cast<int>(rng() % 2);
        std::vector<Coordinate> xs;
        for (int i = 0; i < d; ++i)
            xs.emplace_back(Rat(static_cast<int>(rng() % 1000), 1001 + static_cast<int>(rng() % 500)));
        TargetVector x(std::move(xs));
        int m = d + 1 + static_cast<int>(rng() % 8);
        std::vector<Rat> ws;
        int rest = m;
        for (int i = 0; i + 1 < d; ++i) {
            int ni = 1 + static_cast<int>(rng() % (rest - 1));
            ws.emplace_back(ni, m);
            rest -= ni;
        }
        ws.emplace_back(rest, m);
        Weight w(std::move(ws));
        for (std::int64_t Q : {10, 100}) {
            auto a = dirichlet_solve(x, w, Q);
            CHECK(a.q >= 1);
            CHECK(a.q <= Q);
            CHECK(a.err.lt(Rat(1, Q)));
        }
    }
}

TEST_CASE("best_sequence worked values") {
    auto pell = best_sequence(parse_target_vector("sqrt(2)-1"), parse_weight("1"), 30);
    std::vector<std::int64_t> qs;
    for (const auto& e : pell.entries) qs.push_back(e.q);
    CHECK(qs == std::vector<std::int64_t>{1, 2, 5, 12, 29});
    CHECK_FALSE(pell.terminated);

    auto third = best_sequence(parse_target_vector("1/3"), parse_weight("1"), 10);
    CHECK(third.terminated);
    CHECK(third.entries.back().q == 3);
    CHECK(third.entries.back().err.is_zero());

    auto hyper = best_sequence(parse_target_vector("1/3,sqrt(2)-1"), parse_weight("1/2,1/2"), 100);
    std::vector<std::int64_t> hq;
    for (const auto& e : hyper.entries) hq.push_back(e.q);
    CHECK(hq == std::vector<std::int64_t>{1, 2, 3, 12, 99});
    for (size_t i = 2; i < hq.size(); ++i) CHECK(hq[i] % 3 == 0);
}

TEST_CASE("best_sequence equals the exhaustive oracle") {
    std::vector<std::pair<std::vector<std::string>, std::string>> fixtures = {
        {{"sqrt2-1"}, "1"},
        {{"golden"}, "1"},
        {{"1/3", "sqrt2-1"}, "1/2,1/2"},
        {{"sqrt2-1", "sqrt3-1"}, "1/2,1/2"},
        {{"sqrt2-1", "sqrt3-1"}, "1/3,2/3"},
        {{"2/7", "3/11"}, "1/2,1/2"},
        {{"13/31", "5/17"}, "2/5,3/5"},
        {{"1/2", "1/3"}, "1/4,3/4"},
        {{"123/1000", "sqrt3-1"}, "3/7,4/7"},
        {{"1/5", "sqrt2-1", "4/9"}, "1/3,1/3,1/3"},
        {{"9/10", "3/10"}, "0,1"},
        {{"1/6", "111/333"}, "1/2,1/2"},
    };
    for (const auto& [specs, wspec] : fixtures) {
        INFO("fixture " << wspec);
        Weight w = parse_weight(wspec);
        auto got = best_sequence(lib_vector(specs), w, 2000);
        auto want = oracle::best_sequence(oracle_coords(specs), w, 2000);
        REQUIRE(got.entries.size() == want.size());
        for (size_t i = 0; i < want.size(); ++i) {
            CHECK(got.entries[i].q == want[i].q);
            for (size_t c = 0; c < want[i].p.size(); ++c) CHECK(got.entries[i].p[c] == want[i].p[c]);
        }
    }
}

TEST_CASE("uniform exponent estimates") {
    auto golden = uniform_exponent_estimate(parse_target_vector("golden"), parse_weight("1"), 1000000);
    REQUIRE(golden.outcome == EstimateOutcome::ok);
    CHECK(golden.value >= 0.95);
    CHECK(golden.value <= 1.05);

    auto hyper = uniform_exponent_estimate(parse_target_vector("1/3,sqrt(2)-1"),
                                           parse_weight("1/2,1/2"), 1000000);
    REQUIRE(hyper.outcome == EstimateOutcome::ok);
    CHECK(hyper.value >= 1.8); // rational-head hyperplane: (1 - w_1)^(-1) = 2 asymptotically
    CHECK(hyper.value <= 2.05);

    auto liou = uniform_exponent_estimate(parse_target_vector("liouville(10)"), parse_weight("1"),
                                          10000000);
    REQUIRE(liou.outcome == EstimateOutcome::ok);
    CHECK(liou.value >= 0.9);
    CHECK(liou.value <= 1.1);
}

TEST_CASE("ordinary exponent estimates") {
    auto golden = ordinary_exponent_estimate(parse_target_vector("golden"), parse_weight("1"), 1000000);
    REQUIRE(golden.outcome == EstimateOutcome::ok);
    CHECK(golden.value >= 0.95);
    CHECK(golden.value <= 1.1);

    auto liou = ordinary_exponent_estimate(parse_target_vector("liouville(10)"), parse_weight("1"),
                                           10000000);
    REQUIRE(liou.outcome == EstimateOutcome::ok);
    CHECK(liou.value >= 3.0 - 1e-6); // exactly 3 up to an O(1e-97) term
}

TEST_CASE("ordinary >= uniform on the same data") {
    for (const char* spec : {"golden", "sqrt(2)-1", "liouville(10)"}) {
        auto u = uniform_exponent_estimate(parse_target_vector(spec), parse_weight("1"), 200000);
        auto o = ordinary_exponent_estimate(parse_target_vector(spec), parse_weight("1"), 200000);
        REQUIRE(u.outcome == EstimateOutcome::ok);
        REQUIRE(o.outcome == EstimateOutcome::ok);
        CHECK(o.value >= u.value - 1e-12);
    }
}

TEST_CASE("degenerate estimator outcomes") {
    auto rat = uniform_exponent_estimate(parse_target_vector("1/3"), parse_weight("1"), 100);
    CHECK(rat.outcome == EstimateOutcome::terminated_rational);

    auto tiny = uniform_exponent_estimate(parse_target_vector("golden"), parse_weight("1"), 3);
    CHECK(tiny.outcome == EstimateOutcome::insufficient_data);
}
