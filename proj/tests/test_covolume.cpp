// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <wdio/wdio.hpp>

#include "oracle.hpp"

using namespace wdio;

namespace {

IntMatrix rows(std::initializer_list<std::initializer_list<long long>> init) {
    IntMatrix m;
    for (const auto& r : init) {
        std::vector<Int> row;
        for (long long v : r) row.emplace_back(v);
        m.push_back(std::move(row));
    }
    return m;
}

std::vector<std::vector<Rat>> ux_rows_exact(const IntMatrix& b, const std::vector<Rat>& x) {
    const size_t cols = b[0].size();
    std::vector<std::vector<Rat>> out(b.size(), std::vector<Rat>(cols));
    for (size_t r = 0; r < b.size(); ++r) {
        for (size_t j = 0; j + 1 < cols; ++j) out[r][j] = Rat(b[r][j]) + x[j] * Rat(b[r][cols - 1]);
        out[r][cols - 1] = Rat(b[r][cols - 1]);
    }
    return out;
}

} // namespace

TEST_CASE("covolume of coordinate lines") {
    TargetVector x = parse_target_vector("2/7,3/5");
    Weight w = parse_weight("1/3,2/3");
    // span{e_0} is fixed by u_x and scales by e^(w_1 t)
    SubmoduleBasis e0(rows({{1, 0, 0}}));
    for (double t : {0.0, 1.5, 4.0}) {
        double got = submodule_covolume(e0, x, w, t).convert_to<double>();
        CHECK(std::fabs(got - std::exp(to_double(w.entry(0)) * t)) < 1e-12 * std::exp(t));
    }
    // span{e_n}: u_x e_n = (x, 1), scaled coordinatewise
    SubmoduleBasis en(rows({{0, 0, 1}}));
    for (double t : {0.0, 2.0}) {
        double e1 = std::exp(to_double(w.entry(0)) * t) * to_double(x.coord(0).rational());
        double e2 = std::exp(to_double(w.entry(1)) * t) * to_double(x.coord(1).rational());
        double e3 = std::exp(-t);
        double want = std::sqrt(e1 * e1 + e2 * e2 + e3 * e3);
        double got = submodule_covolume(en, x, w, t).convert_to<double>();
        CHECK(std::fabs(got - want) < 1e-12 * std::max(1.0, want));
    }
}

TEST_CASE("Gram determinant cross-check is exact at t = 0") {
    std::mt19937_64 rng(29);
    for (int iter = 0; iter < 40; ++iter) {
        int j = 1 + static_cast<int>(rng() % 2);
        IntMatrix m;
        for (int r = 0; r < j; ++r) {
            std::vector<Int> row;
            for (int c = 0; c < 3; ++c) row.emplace_back(static_cast<int>(rng() % 11) - 5);
            m.push_back(std::move(row));
        }
        IntMatrix h = m;
        if (detail::hnf_rows(h) != j) continue; // skip rank-deficient draws
        std::vector<Rat> x{Rat(static_cast<int>(rng() % 17), 17), Rat(static_cast<int>(rng() % 13), 13)};
        auto exact_rows = ux_rows_exact(m, x);
        Rat lhs = oracle::minor_square_sum(exact_rows); // Cauchy-Binet left side
        Rat rhs = oracle::gram_det(exact_rows);
        CHECK(lhs == rhs);
        // library covolume at t = 0 agrees with the exact value
        SubmoduleBasis basis(m);
        TargetVector xv({Coordinate(x[0]), Coordinate(x[1])});
        Weight w = parse_weight("1/2,1/2");
        BigFloat got = submodule_covolume(basis, xv, w, 0.0);
        BigFloat want = sqrt(detail::bigfloat_of(rhs));
        BigFloat rel = abs(got - want) / want;
        CHECK(rel.convert_to<double>() < 1e-80);
    }
}

TEST_CASE("flow cocycle on covolumes") {
    TargetVector x = parse_target_vector("1/3,sqrt(2)-1");
    Weight w = parse_weight("1/4,3/4");
    SubmoduleBasis basis(rows({{1, 0, 2}, {0, 1, 1}}));
    auto comps = transformed_wedge(basis, x, w);
    const double t1 = 0.75, t2 = 1.875; // dyadic: t1 + t2 is exact in double
    BigFloat direct = covolume_from_components(comps, t1 + t2);
    // apply the diagonal scaling of t2 to the t1-transformed wedge
    std::vector<WedgeComponent> scaled = comps;
    for (auto& c : scaled) c.minor *= exp(detail::bigfloat_of(c.exp_coeff) * BigFloat(t2));
    BigFloat staged = covolume_from_components(scaled, t1);
    BigFloat rel = abs(direct - staged) / direct;
    // 2^-(P+4) at P = 256 is ~1e-78; the 384-bit floats leave ample room
    CHECK(rel.convert_to<double>() < std::pow(2.0, -252.0));
}

TEST_CASE("decomposition check: single-vector case") {
    TargetVector x = parse_target_vector("2/7,3/5");
    Weight w = parse_weight("1/2,1/2");
    SubmoduleBasis v(rows({{-3, 1, 4}})); // q = 4, p = (3, -1)
    for (double t : {0.0, 1.0, 3.0}) {
        auto chk = covolume_decomposition_check(v, x, w, t, std::sqrt(3.0));
        CHECK(chk.pass);
        CHECK(chk.ratio >= 1.0 - 1e-12); // norm of a sum of orthogonal parts dominates the max
        CHECK(chk.ratio <= std::sqrt(2.0) + 1e-12);
        CHECK(chk.q == 4);
    }
}

TEST_CASE("decomposition check: random rank-2 corpus") {
    std::mt19937_64 rng(31);
    int tested = 0;
    while (tested < 60) {
        IntMatrix m;
        for (int r = 0; r < 2; ++r) {
            std::vector<Int> row;
            for (int c = 0; c < 3; ++c) row.emplace_back(static_cast<int>(rng() % 15) - 7);
            m.push_back(std::move(row));
        }
        IntMatrix h = m;
        if (detail::hnf_rows(h) != 2) continue;
        ++tested;
        TargetVector x({Coordinate(Rat(static_cast<int>(rng() % 23), 23)),
                        Coordinate(Rat(static_cast<int>(rng() % 19), 19))});
        double t = static_cast<double>(rng() % 1000) / 100.0;
        auto chk = covolume_decomposition_check(SubmoduleBasis(m), x, parse_weight("1/3,2/3"), t, 6.0);
        INFO("t=" << t << " ratio=" << chk.ratio);
        CHECK(chk.pass); // C = (n+1)! = 6
        CHECK(chk.ratio <= std::sqrt(2.0) + 1e-9);
        CHECK(chk.ratio >= 1.0 - 1e-9);
    }
}

TEST_CASE("decomposition check: q = 0 branch degenerates to the covolume") {
    TargetVector x = parse_target_vector("1/3,1/7");
    Weight w = parse_weight("1/2,1/2");
    SubmoduleBasis v0(rows({{1, 0, 0}, {0, 1, 0}}));
    auto chk = covolume_decomposition_check(v0, x, w, 2.0, 1.0 + 1e-9);
    CHECK(chk.q_zero_branch);
    CHECK(chk.pass);
    CHECK(std::fabs(chk.ratio - 1.0) < 1e-12);
}

TEST_CASE("basis canonicalization and rank checks") {
    SubmoduleBasis a(rows({{1, 1, 0}, {0, 1, 0}}));
    SubmoduleBasis b(rows({{1, 0, 0}, {0, 1, 0}}));
    CHECK(a.rows() == b.rows()); // HNF canonical form
    CHECK_THROWS_AS(SubmoduleBasis(rows({{1, 2, 3}, {2, 4, 6}})), input_error);
}
