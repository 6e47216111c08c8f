// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <wdio/wdio.hpp>

#include "oracle.hpp"

using namespace wdio;

TEST_CASE("quasi-norm on worked values") {
    Weight w_half = parse_weight("1/2,1/2");

    auto v1 = quasi_norm(parse_target_vector("1/2,1/2"), w_half);
    CHECK(v1.approx() == Rat(1, 4));

    auto v2 = quasi_norm(parse_target_vector("1/2,1/8"), parse_weight("1/3,2/3"));
    CHECK(v2.approx() == Rat(1, 8)); // max((1/2)^3, (1/8)^(3/2)) attained by the exact cube

    auto v3 = quasi_norm(parse_target_vector("9/10,3/10"), parse_weight("0,1"));
    CHECK(v3.approx() == Rat(3, 10)); // zero-weight coordinate in (0,1) contributes 0
}

TEST_CASE("quasi-norm threshold decisions are exact") {
    Weight w = parse_weight("1/2,1/2");
    CHECK(quasi_norm_leq(parse_target_vector("1/2,1/2"), w, Rat(1, 4)));       // equality case
    CHECK_FALSE(quasi_norm_leq(parse_target_vector("1/2,1/2"), w, Rat(1, 5)));
    CHECK(quasi_norm_leq(parse_target_vector("1/3,0"), w, Rat(1, 9)));
}

TEST_CASE("zero-weight coordinates follow the limit convention") {
    Weight w = parse_weight("0,1");
    // |x_1| = 1 contributes exactly 1
    auto v = quasi_norm(parse_target_vector("1,1/10"), w);
    CHECK(v.approx() == Rat(1));
    CHECK(quasi_norm_leq(parse_target_vector("1,1/10"), w, Rat(1)));
    CHECK_FALSE(quasi_norm_leq(parse_target_vector("1,1/10"), w, Rat(9, 10)));
    // |x_1| > 1 makes the norm infinite
    auto vi = quasi_norm(parse_target_vector("3/2,1/10"), w);
    CHECK(vi.is_infinite());
    CHECK_FALSE(quasi_norm_leq(parse_target_vector("3/2,1/10"), w, Rat(1000000)));
}

TEST_CASE("weight restriction") {
    Weight w = parse_weight("0,1/2,1/2");
    Weight r = weight_restriction(w, 1);
    CHECK(r.dim() == 2);
    CHECK(r.entry(0) == Rat(1, 2));

    Weight w2 = parse_weight("0,0,1");
    CHECK(weight_restriction(w2, 2).dim() == 1);
    CHECK(weight_restriction(w2, 2).entry(0) == Rat(1));

    CHECK_THROWS_AS(weight_restriction(parse_weight("1/3,1/3,1/3"), 1), input_error);
}

TEST_CASE("weight validation and set extrema") {
    CHECK_THROWS_AS(parse_weight("1/2,1/3"), input_error);   // sum != 1
    CHECK_THROWS_AS(parse_weight("3/2,-1/2"), input_error);  // out of range
    CHECK(parse_weight("1/2,1/2").is_proper());
    CHECK_FALSE(parse_weight("0,1").is_proper());

    WeightSet W = parse_weight_set("1/2,1/2;1/4,3/4");
    CHECK(W.w_min() == Rat(1, 4));
    CHECK(W.w_max() == Rat(3, 4));
    CHECK(W.all_proper());

    WeightSet G = grid_weights(2, 8);
    CHECK(G.size() == 7);
    CHECK((G.w_min() > 0) == G.all_proper());

    WeightSet improper({parse_weight("0,1"), parse_weight("1/2,1/2")});
    CHECK(improper.w_min() == 0);
    CHECK_FALSE(improper.all_proper());
}

TEST_CASE("leq agrees with the certified approximation away from the margin") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> num(0, 40), den(1, 40);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<Rat> xs{Rat(num(rng), den(rng) + 40), Rat(num(rng), den(rng) + 40)};
        int m = 2 + static_cast<int>(rng() % 6);
        int n1 = 1 + static_cast<int>(rng() % (m - 1));
        Weight w({Rat(n1, m), Rat(m - n1, m)});
        TargetVector x({Coordinate(xs[0]), Coordinate(xs[1])});
        auto v = quasi_norm(x, w);
        Rat a = v.approx();
        Rat r(num(rng) + 1, den(rng) + 10);
        // decision margin far above 2^-(P-2) here
        if (a == 0 || abs(a - r) > a / 1000) {
            CHECK(quasi_norm_leq(x, w, r) == (a <= r));
        }
    }
}

TEST_CASE("homogeneity under exact rational scalings") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 100; ++iter) {
        int m = 2 + static_cast<int>(rng() % 5);
        int n1 = 1 + static_cast<int>(rng() % (m - 1));
        Weight w({Rat(n1, m), Rat(m - n1, m)});
        Rat s(1 + static_cast<int>(rng() % 8), 9 + static_cast<int>(rng() % 8));
        Rat t = rat_pow(s, m); // t = s^m so that t^(w_i) = s^(n_i) stays rational
        std::vector<Rat> xs{Rat(static_cast<int>(rng() % 50), 50 + static_cast<int>(rng() % 20)),
                            Rat(static_cast<int>(rng() % 50), 50 + static_cast<int>(rng() % 20))};
        TargetVector x({Coordinate(xs[0]), Coordinate(xs[1])});
        TargetVector y({Coordinate(rat_pow(s, n1) * xs[0]), Coordinate(rat_pow(s, m - n1) * xs[1])});
        Rat r(1 + static_cast<int>(rng() % 30), 1 + static_cast<int>(rng() % 30));
        CHECK(quasi_norm_leq(y, w, t * r) == quasi_norm_leq(x, w, r));
    }
}

TEST_CASE("threshold monotonicity") {
    std::mt19937_64 rng(13);
    Weight w = parse_weight("2/5,3/5");
    for (int iter = 0; iter < 100; ++iter) {
        TargetVector x({Coordinate(Rat(static_cast<int>(rng() % 60), 61)),
                        Coordinate(Rat(static_cast<int>(rng() % 60), 61))});
        Rat r1(1 + static_cast<int>(rng() % 40), 40), r2 = r1 + Rat(1 + static_cast<int>(rng() % 10), 40);
        if (quasi_norm_leq(x, w, r1)) CHECK(quasi_norm_leq(x, w, r2));
    }
}

TEST_CASE("computable reals produce nested intervals") {
    for (const Coordinate& c : {parse_coordinate("golden"), parse_coordinate("sqrt(2)-1"),
                                parse_coordinate("liouville(10)"), parse_coordinate("cf(1,2,3)")}) {
        REQUIRE_FALSE(c.is_rational());
        CHECK(c.known_irrational());
        RatInterval prev = c.interval(16);
        for (int k : {32, 64, 128, 256}) {
            RatInterval iv = c.interval(k);
            CHECK(iv.lo >= prev.lo);
            CHECK(iv.hi <= prev.hi);
            CHECK(iv.width() <= rat_pow(Rat(1, 2), k));
            prev = iv;
        }
    }
}

TEST_CASE("golden ratio interval matches the oracle") {
    Coordinate g = parse_coordinate("golden");
    RatInterval iv = g.interval(200);
    oracle::Interval o = oracle::sqrt_shift(Int(5), Rat(-1), 210); // sqrt(5) - 1
    CHECK(iv.lo >= o.lo / 2 - rat_pow(Rat(1, 2), 199));
    CHECK(iv.hi <= o.hi / 2 + rat_pow(Rat(1, 2), 199));
}

TEST_CASE("coordinate grammar round-trips") {
    for (const char* s : {"1/3", "-2/7", "0.25", "sqrt(2)-1", "golden", "liouville(10)",
                          "cf(1,2)", "cf(arith)", "cf(qdouble)", "affine(1/2,sqrt(2),0)",
                          "sqrt(13)-7/2"}) {
        Coordinate c = parse_coordinate(s);
        Coordinate c2 = parse_coordinate(c.spec());
        RatInterval a = c.interval(150), b = c2.interval(150);
        CHECK(a.lo <= b.hi);
        CHECK(b.lo <= a.hi); // same value: intervals intersect
    }
    CHECK(parse_coordinate("0.25").rational() == Rat(1, 4));
    CHECK(parse_coordinate("sqrt(4)").is_rational()); // perfect square collapses
    CHECK(parse_coordinate("sqrt(4)").rational() == Rat(2));
    CHECK(parse_coordinate("-sqrt(2)+2").real().irrational());
}

TEST_CASE("parser reports positions on malformed input") {
    try {
        parse_rational("12/x3");
        FAIL("expected input_error");
    } catch (const input_error& e) {
        CHECK(e.col >= 1);
    }
    CHECK_THROWS_AS(parse_target_vector("1/3,,2"), input_error);
    CHECK_THROWS_AS(parse_rational("1/0"), input_error);
    CHECK_THROWS_AS(parse_weight_set("grid(1/8)"), input_error); // dimension required
    CHECK(parse_weight_set("grid(1/8)", 2).size() == 7);
}

TEST_CASE("integer nth root") {
    std::mt19937_64 rng(17);
    for (int iter = 0; iter < 200; ++iter) {
        Int a = Int(rng()) * Int(rng()) % (Int(1) << 96);
        unsigned n = 1 + static_cast<unsigned>(rng() % 7);
        Int r = nth_root_floor(a, n);
        CHECK(int_pow(r, n) <= a);
        CHECK(int_pow(r + 1, n) > a);
    }
}

TEST_CASE("decimal formatting is deterministic and truncating") {
    CHECK(decimal_string(Rat(1, 4), 2) == "2.5e-01");
    CHECK(decimal_string(Rat(1, 3), 5) == "3.3333e-01");
    CHECK(decimal_string(Rat(-22, 7), 4) == "-3.142e+00");
    CHECK(decimal_string(Rat(1000), 4) == "1.000e+03");
}
