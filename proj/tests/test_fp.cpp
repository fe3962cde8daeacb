#include "doctest.h"
#include "lazlie/fp.hpp"
#include "lazlie/rng.hpp"

using namespace lazlie;

TEST_CASE("scalar arithmetic") {
    CHECK(fp_add(3, 4, 5) == 2);
    CHECK(fp_sub(1, 3, 5) == 3);
    CHECK(fp_neg(2, 7) == 5);
    CHECK(fp_neg(0, 7) == 0);
    CHECK(fp_mul(3, 4, 5) == 2);
    CHECK(fp_pow(3, 4, 5) == 1);
    CHECK(fp_pow(2, 0, 7) == 1);

    // inverse table mod 7
    u32 want[7] = {0, 1, 4, 5, 2, 3, 6};
    for (u32 a = 1; a < 7; ++a) CHECK(fp_inv(a, 7) == want[a]);
    CHECK_THROWS(fp_inv(0, 7));

    CHECK(fp_of_rational(1, 2, 5) == 3);
    CHECK(fp_of_rational(-1, 12, 7) == 4);
    CHECK(fp_of_rational(1, 12, 7) == 3);
    CHECK(fp_of_rational(0, 3, 5) == 0);
    CHECK_THROWS(fp_of_rational(1, 5, 5));
    CHECK_THROWS(fp_of_rational(1, 10, 5));

    CHECK_FALSE(is_odd_prime(1));
    CHECK_FALSE(is_odd_prime(2));
    CHECK(is_odd_prime(3));
    CHECK(is_odd_prime(5));
    CHECK(is_odd_prime(7));
    CHECK_FALSE(is_odd_prime(9));
    CHECK(is_odd_prime(11));
    CHECK_FALSE(is_odd_prime(91));
}

TEST_CASE("rref on a frozen example") {
    Mat m = Mat::from_rows(5, 2, {{2, 4}, {1, 2}});
    auto r = rref(m);
    CHECK(r.m.rows == 1);
    CHECK(r.m.row(0) == Vec{1, 2});
    REQUIRE(r.pivots.size() == 1);
    CHECK(r.pivots[0] == 0);
}

TEST_CASE("rref structural properties on seeded samples") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        u32 p = (trial % 3 == 0) ? 3 : (trial % 3 == 1) ? 5 : 7;
        std::size_t rows = 1 + rng.below(5), cols = 1 + rng.below(5);
        Mat m(p, rows, cols);
        for (auto& x : m.a) x = rng.below(p);
        auto r = rref(m);
        // idempotent
        CHECK(rref(r.m).m == r.m);
        // pivot shape: strictly increasing columns, unit pivot, cleared column
        for (std::size_t i = 0; i < r.m.rows; ++i) {
            if (i > 0) CHECK(r.pivots[i] > r.pivots[i - 1]);
            CHECK(r.m.at(i, r.pivots[i]) == 1);
            for (std::size_t k = 0; k < r.m.rows; ++k)
                if (k != i) CHECK(r.m.at(k, r.pivots[i]) == 0);
        }
        // same row space
        for (std::size_t i = 0; i < rows; ++i) CHECK(in_span(r, m.row(i)));
        CHECK(span_dim(vstack(m, r.m)) == r.m.rows);
    }
}

TEST_CASE("solve matches exhaustive enumeration over F_5^2") {
    Mat reg = Mat::from_rows(5, 2, {{1, 2}, {3, 4}});
    Mat sing = Mat::from_rows(5, 2, {{1, 2}, {2, 4}});
    for (u32 b0 = 0; b0 < 5; ++b0)
        for (u32 b1 = 0; b1 < 5; ++b1) {
            Vec b{b0, b1};
            for (const Mat& m : {reg, sing}) {
                int hits = 0;
                for (u32 x0 = 0; x0 < 5; ++x0)
                    for (u32 x1 = 0; x1 < 5; ++x1) {
                        Vec lhs = vec_apply(Vec{x0, x1}, transpose(m));
                        if (lhs == b) ++hits;
                    }
                auto got = solve(m, b);
                if (hits == 0) {
                    CHECK_FALSE(got.has_value());
                } else {
                    REQUIRE(got.has_value());
                    CHECK(vec_apply(*got, transpose(m)) == b);
                }
            }
        }
}

TEST_CASE("solve picks zero free variables") {
    Mat m = Mat::from_rows(5, 2, {{1, 1}});
    auto x = solve(m, Vec{3});
    REQUIRE(x.has_value());
    CHECK(*x == Vec{3, 0});
}

TEST_CASE("kernel on a frozen example and by property") {
    Mat m = Mat::from_rows(5, 2, {{1, 2}, {2, 4}});
    Mat k = kernel(m);
    REQUIRE(k.rows == 1);
    CHECK(k.row(0) == Vec{3, 1});

    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        u32 p = trial % 2 ? 5 : 3;
        Mat a(p, 1 + rng.below(4), 1 + rng.below(4));
        for (auto& x : a.a) x = rng.below(p);
        Mat kk = kernel(a);
        CHECK(kk.rows + span_dim(a) == a.cols);
        for (std::size_t r = 0; r < kk.rows; ++r) {
            Vec prod = vec_apply(kk.row(r), transpose(a));
            CHECK(vec_is_zero(prod));
        }
    }
}

TEST_CASE("complement_basis returns the missing unit vectors") {
    Mat sub = Mat::from_rows(5, 2, {{1, 1}});
    Mat comp = complement_basis(sub, 2);
    REQUIRE(comp.rows == 1);
    CHECK(comp.row(0) == Vec{0, 1});
    CHECK(span_dim(vstack(sub, comp)) == 2);
}

TEST_CASE("intersect_spans against membership enumeration over F_3^3") {
    Rng rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        Mat a(3, 1 + rng.below(3), 3), b(3, 1 + rng.below(3), 3);
        for (auto& x : a.a) x = rng.below(3);
        for (auto& x : b.a) x = rng.below(3);
        Mat inter = intersect_spans(a, b);
        auto ra = rref(a);
        auto rb = rref(b);
        auto ri = rref(inter);
        std::size_t count = 0;
        for (u32 v0 = 0; v0 < 3; ++v0)
            for (u32 v1 = 0; v1 < 3; ++v1)
                for (u32 v2 = 0; v2 < 3; ++v2) {
                    Vec v{v0, v1, v2};
                    bool both = in_span(ra, v) && in_span(rb, v);
                    CHECK(both == in_span(ri, v));
                    if (both && !vec_is_zero(v)) ++count;
                }
        // |subspace| = 3^dim
        std::size_t want = 1;
        for (std::size_t i = 0; i < inter.rows; ++i) want *= 3;
        CHECK(count + 1 == want);
    }
}

TEST_CASE("intersect_spans frozen example") {
    Mat a = Mat::from_rows(5, 3, {{1, 0, 0}, {0, 1, 0}});
    Mat b = Mat::from_rows(5, 3, {{1, 1, 0}, {0, 0, 1}});
    Mat i = intersect_spans(a, b);
    REQUIRE(i.rows == 1);
    CHECK(i.row(0) == Vec{1, 1, 0});
}

TEST_CASE("coords_in inverts span combinations") {
    Mat basis = Mat::from_rows(5, 3, {{1, 1, 0}, {0, 1, 1}});
    auto co = coords_in(basis, Vec{1, 2, 1});
    REQUIRE(co.has_value());
    CHECK(*co == Vec{1, 1});
    CHECK_FALSE(coords_in(basis, Vec{0, 0, 1}).has_value());
}

TEST_CASE("mat_inverse") {
    Mat m = Mat::from_rows(5, 2, {{1, 2}, {3, 4}});
    auto inv = mat_inverse(m);
    REQUIRE(inv.has_value());
    CHECK(mat_mul(m, *inv) == Mat::identity(5, 2));
    CHECK(mat_mul(*inv, m) == Mat::identity(5, 2));
    CHECK(inv->row(0) == Vec{3, 1});
    CHECK(inv->row(1) == Vec{4, 2});

    Mat s = Mat::from_rows(5, 2, {{1, 2}, {2, 4}});
    CHECK_FALSE(mat_inverse(s).has_value());
}

TEST_CASE("rng rejection sampling is in range and deterministic") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        u32 x = a.below(7);
        CHECK(x < 7);
        CHECK(x == b.below(7));
    }
    CHECK(Rng(1).below(1) == 0);
}
