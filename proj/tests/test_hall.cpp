#include <thread>

#include "doctest.h"
#include "lazlie/hall.hpp"
#include "lazlie/rng.hpp"
#include "support/words.hpp"

using namespace lazlie;
using testsupport::WordAlg;

namespace {

// Associative expansion of every Hall monomial: the independent model the
// rewriter is checked against.
std::vector<WordAlg::Elt> expansions(const FreeLie& F, const WordAlg& W) {
    std::vector<WordAlg::Elt> e(F.dim());
    for (std::size_t i = 0; i < F.dim(); ++i) {
        const HallMono& m = F.mono(static_cast<int>(i));
        if (m.gen >= 0)
            e[i] = W.letter(m.gen);
        else
            e[i] = W.comm(e[static_cast<std::size_t>(m.left)],
                          e[static_cast<std::size_t>(m.right)]);
    }
    return e;
}

WordAlg::Elt expand_poly(const FreeLie& F, const WordAlg& W,
                         const std::vector<WordAlg::Elt>& e, const LiePoly& q) {
    WordAlg::Elt acc;
    for (const auto& [m, co] : q) acc = W.add(acc, W.scale(co, e[static_cast<std::size_t>(m)]));
    return acc;
}

}  // namespace

TEST_CASE("witt_count") {
    CHECK(witt_count(2, 1) == 2);
    CHECK(witt_count(2, 2) == 1);
    CHECK(witt_count(2, 3) == 2);
    CHECK(witt_count(2, 4) == 3);
    CHECK(witt_count(2, 5) == 6);
    CHECK(witt_count(2, 6) == 9);
    CHECK(witt_count(3, 1) == 3);
    CHECK(witt_count(3, 2) == 3);
    CHECK(witt_count(3, 3) == 8);
    CHECK(witt_count(3, 4) == 18);
    CHECK(witt_count(1, 1) == 1);
    CHECK(witt_count(1, 2) == 0);
}

TEST_CASE("hall basis for two weight-1 generators, class 3") {
    FreeLie F({1, 1}, 3, 5);
    REQUIRE(F.dim() == 5);
    CHECK(F.name(0) == "X");
    CHECK(F.name(1) == "Y");
    CHECK(F.name(2) == "[Y,X]");
    CHECK(F.name(3) == "[[Y,X],X]");
    CHECK(F.name(4) == "[[Y,X],Y]");
}

TEST_CASE("hall basis for weights (1,2), class 3") {
    FreeLie F({1, 2}, 3, 5);
    REQUIRE(F.dim() == 3);
    CHECK(F.name(0) == "X");
    CHECK(F.name(1) == "Y");
    CHECK(F.name(2) == "[Y,X]");
    CHECK(F.mono(1).deg == 2);
    CHECK(F.mono(2).deg == 3);
}

TEST_CASE("hall dimensions match the Witt formula for weight-1 generators") {
    for (int n = 1; n <= 3; ++n)
        for (int c = 1; c <= 6; ++c) {
            FreeLie F(std::vector<int>(static_cast<std::size_t>(n), 1), c, 5);
            u64 want = 0;
            for (int d = 1; d <= c; ++d) want += witt_count(static_cast<u64>(n), static_cast<u64>(d));
            CHECK(F.dim() == want);
        }
}

TEST_CASE("normal form on frozen pairs, class 4") {
    FreeLie F({1, 1}, 4, 5);
    REQUIRE(F.dim() == 8);
    CHECK(F.name(5) == "[[[Y,X],X],X]");
    CHECK(F.name(6) == "[[[Y,X],X],Y]");
    CHECK(F.name(7) == "[[[Y,X],Y],Y]");

    CHECK(F.bracket_mono(1, 0) == LiePoly{{2, 1}});
    CHECK(F.bracket_mono(0, 1) == LiePoly{{2, 4}});
    CHECK(F.bracket_mono(2, 0) == LiePoly{{3, 1}});
    CHECK(F.bracket_mono(2, 1) == LiePoly{{4, 1}});
    CHECK(F.bracket_mono(3, 0) == LiePoly{{5, 1}});
    CHECK(F.bracket_mono(3, 1) == LiePoly{{6, 1}});
    CHECK(F.bracket_mono(4, 1) == LiePoly{{7, 1}});
    // [[Y,X],Y] with X needs the Jacobi rewrite: [[[Y,X],Y],X] =
    // [[[Y,X],X],Y] + [[Y,X],[Y,X]] and the second summand vanishes.
    CHECK(F.bracket_mono(4, 0) == LiePoly{{6, 1}});
    CHECK(F.bracket_mono(2, 2).empty());
    // truncation past the class
    CHECK(F.bracket_mono(5, 4).empty());

    FreeLie G({1, 1}, 3, 5);
    CHECK(G.bracket_mono(3, 0).empty());
}

TEST_CASE("rewriter agrees with the associative model on all pairs") {
    struct Case {
        std::vector<int> w;
        int c;
        u32 p;
    };
    for (const Case& cs : {Case{{1, 1}, 4, 5}, Case{{1, 2}, 4, 5}, Case{{1, 1, 1}, 3, 7}}) {
        FreeLie F(cs.w, cs.c, cs.p);
        WordAlg W(cs.w, cs.c, cs.p);
        auto e = expansions(F, W);

        // basis expansions are linearly independent in the word algebra
        Mat rows(cs.p, 0, W.nwords());
        for (const auto& el : e) rows.append_row(W.to_vec(el));
        CHECK(span_dim(rows) == F.dim());

        // bracket table matches commutators of expansions
        for (std::size_t i = 0; i < F.dim(); ++i)
            for (std::size_t j = 0; j < F.dim(); ++j) {
                auto nf = F.bracket_mono(static_cast<int>(i), static_cast<int>(j));
                auto want = W.comm(e[i], e[j]);
                CHECK(expand_poly(F, W, e, nf) == want);
            }
    }
}

TEST_CASE("poly arithmetic and identities on seeded samples") {
    FreeLie F({1, 1}, 5, 5);
    Rng rng(123);
    auto random_poly = [&]() {
        LiePoly q;
        for (int t = 0; t < 3; ++t) {
            int m = static_cast<int>(rng.below(static_cast<u32>(F.dim())));
            u32 co = rng.below(5);
            if (co) q = F.add(q, F.scale(co, LiePoly{{m, 1}}));
        }
        return q;
    };
    for (int trial = 0; trial < 50; ++trial) {
        LiePoly a = random_poly(), b = random_poly(), c = random_poly();
        CHECK(F.add(F.bracket(a, b), F.bracket(b, a)).empty());
        CHECK(F.bracket(a, a).empty());
        LiePoly jac = F.add(F.add(F.bracket(F.bracket(a, b), c), F.bracket(F.bracket(b, c), a)),
                            F.bracket(F.bracket(c, a), b));
        CHECK(jac.empty());
    }
}

TEST_CASE("lev_deg") {
    FreeLie F({1, 1}, 3, 5);
    CHECK(F.lev_deg(F.zero()) == std::pair{4, 4});
    CHECK(F.lev_deg(F.gen(0)) == std::pair{1, 1});
    LiePoly mixed = F.add(F.gen(0), F.bracket(F.gen(1), F.gen(0)));
    CHECK(F.lev_deg(mixed) == std::pair{1, 2});
    CHECK(F.lev_deg(F.bracket(F.gen(1), F.gen(0))) == std::pair{2, 2});
}

TEST_CASE("free algebra materializes to a valid flagged algebra") {
    for (int c = 1; c <= 5; ++c) {
        Lla L = free_lla({1, 1}, c, 5);
        CHECK_FALSE(validate(L).has_value());
    }
    Lla L3 = free_lla({1, 1, 1}, 3, 7);
    CHECK_FALSE(validate(L3).has_value());
    Lla Lw = free_lla({1, 2}, 3, 5);
    CHECK_FALSE(validate(Lw).has_value());

    Lla L = free_lla({1, 1}, 3, 5);
    CHECK(L.flag[1].rows == 5);
    CHECK(L.flag[2].rows == 3);
    CHECK(L.flag[3].rows == 2);
    CHECK(L.flag[4].rows == 0);
    CHECK(L.label(2) == "[Y,X]");
}

TEST_CASE("hom_from_generators: identity and the swap automorphism") {
    FreeLie F({1, 1}, 2, 5);
    Lla L = F.to_lla();
    Mat id = hom_from_generators(F, L, {vec_unit(3, 0), vec_unit(3, 1)});
    CHECK(id == Mat::identity(5, 3));
    Mat swap = hom_from_generators(F, L, {vec_unit(3, 1), vec_unit(3, 0)});
    CHECK(swap.row(0) == Vec{0, 1, 0});
    CHECK(swap.row(1) == Vec{1, 0, 0});
    CHECK(swap.row(2) == Vec{0, 0, 4});
    CHECK_FALSE(hom_violation(L, L, swap).has_value());
}

TEST_CASE("concurrent normal_form requests agree with a fresh context") {
    FreeLie shared({1, 1}, 5, 5);
    FreeLie fresh({1, 1}, 5, 5);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < static_cast<int>(shared.dim()); ++i)
        for (int j = 0; j < static_cast<int>(shared.dim()); ++j) pairs.emplace_back(i, j);
    std::vector<LiePoly> got(pairs.size());
    std::vector<std::thread> pool;
    for (int t = 0; t < 8; ++t)
        pool.emplace_back([&, t]() {
            for (std::size_t k = static_cast<std::size_t>(t); k < pairs.size(); k += 8)
                got[k] = shared.bracket_mono(pairs[k].first, pairs[k].second);
        });
    for (auto& th : pool) th.join();
    for (std::size_t k = 0; k < pairs.size(); ++k)
        CHECK(got[k] == fresh.bracket_mono(pairs[k].first, pairs[k].second));
}
