#include <algorithm>
#include <set>

#include "doctest.h"
#include "lazlie/amalgam.hpp"
#include "lazlie/hall.hpp"
#include "lazlie/witnesses.hpp"

using namespace lazlie;

namespace {

Lla heis(u32 p) {
    std::vector<Vec> sc = {{0, 0, 0}, {0, 0, 0}, {1, 0, 0}};
    return lla_from_levels(p, 2, sc, {2, 1, 1}, {"a", "b", "c"});
}

SymTerm atom(std::size_t i) {
    SymTerm t;
    t.atom = static_cast<int>(i);
    return t;
}

}  // namespace

TEST_CASE("tree family: dimensions, levels and the full bracket table") {
    for (int n : {2, 3, 4}) {
        auto inst = build_sop3(n, 5);
        const Lla& V = inst.V;
        std::size_t nn = static_cast<std::size_t>(n);
        CHECK(V.dim == 4 * nn + nn * (nn - 1) / 2);
        CHECK(!validate(V));
        CHECK(V.flag[1].rows == V.dim);
        CHECK(V.flag[2].rows == 2 * nn + nn * (nn - 1) / 2);
        CHECK(V.flag[3].rows == nn * (nn - 1) / 2);
        CHECK(V.flag[4].rows == 0);

        // the only nonzero products pair a primed a with a later b
        std::size_t nonzero = 0;
        for (std::size_t s = 0; s < V.dim; ++s)
            for (std::size_t t = s + 1; t < V.dim; ++t) {
                Vec q = V.bracket_basis(s, t);
                if (vec_is_zero(q)) continue;
                ++nonzero;
                bool expected = false;
                for (int i = 0; i < n && !expected; ++i)
                    for (int j = i + 1; j < n && !expected; ++j)
                        if (s == inst.a_prime(i) && t == inst.b(j)) {
                            CHECK(q == vec_unit(V.dim, inst.d(i, j)));
                            expected = true;
                        }
                CHECK(expected);
            }
        CHECK(nonzero == nn * (nn - 1) / 2);
    }
    CHECK(build_sop3(2, 5).V.label(0) == "a0");
    CHECK_THROWS_AS(build_sop3(0, 5), std::invalid_argument);
    CHECK_THROWS_AS(build_sop3(2, 4), std::invalid_argument);
    CHECK_THROWS_AS(build_sop3(2, 2), std::invalid_argument);
}

TEST_CASE("tree family: every split pattern is realized by one new element") {
    for (int n : {2, 3}) {
        auto inst = build_sop3(n, 5);
        for (int k = 0; k < n; ++k) {
            auto real = sop3_claim1(inst, k);
            CHECK(real.equations.size() == static_cast<std::size_t>(n));
            CHECK(!embedding_violation(inst.V, real.S, real.emb));
            CHECK(real.S.level(real.cstar) == 1);
            for (int i = 0; i <= k; ++i)
                CHECK(real.S.bracket(real.cstar, real.emb.row(inst.b(i))) ==
                      real.emb.row(inst.b_prime(i)));
            for (int j = k + 1; j < n; ++j)
                CHECK(real.S.bracket(real.cstar, real.emb.row(inst.a(j))) ==
                      real.emb.row(inst.a_prime(j)));
        }
    }

    // the unconstrained products stay free: they land outside the image
    auto inst = build_sop3(2, 5);
    auto real = sop3_claim1(inst, 0);
    Vec free_prod = real.S.bracket(real.cstar, real.emb.row(inst.a(0)));
    CHECK(!vec_is_zero(free_prod));
    CHECK(free_prod != real.emb.row(inst.a_prime(0)));

    CHECK_THROWS_AS(sop3_claim1(inst, -1), std::invalid_argument);
    CHECK_THROWS_AS(sop3_claim1(inst, 2), std::invalid_argument);
}

TEST_CASE("tree family: the reversed pattern refutes itself") {
    auto inst = build_sop3(3, 5);
    SUBCASE("ordered pairs yield a contradiction") {
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                auto cert = sop3_claim2(inst, i, j);
                CHECK(cert.contradiction);
                CHECK(check_refutation(inst, cert));
                CHECK(cert.display.find("= 0 + 0 = 0") != std::string::npos);
                CHECK(cert.steps.size() == 8);
                CHECK(cert.start[0] == atom(inst.d(i, j)));
            }
        auto cert = sop3_claim2(inst, 0, 1);
        CHECK(cert.display.substr(0, 3) == "d01");
    }
    SUBCASE("reversed or equal pairs derive an unforced zero") {
        for (auto [i, j] : {std::pair{1, 0}, std::pair{1, 1}, std::pair{2, 0}}) {
            auto cert = sop3_claim2(inst, i, j);
            CHECK(!cert.contradiction);
            CHECK(check_refutation(inst, cert));
            CHECK(cert.steps.size() == 7);
        }
    }
    SUBCASE("tampered certificates are rejected") {
        auto good = sop3_claim2(inst, 0, 1);
        std::string why;

        auto c1 = good;
        c1.contradiction = false;
        CHECK(!check_refutation(inst, c1, &why));

        auto c2 = good;
        c2.steps.pop_back();
        CHECK(!check_refutation(inst, c2, &why));
        CHECK(why.find("empty sum") != std::string::npos);

        auto c3 = good;
        c3.start[0] = atom(inst.d(0, 2));
        CHECK(!check_refutation(inst, c3, &why));

        auto c4 = good;
        c4.steps[0].replacement = atom(inst.b(1));
        CHECK(!check_refutation(inst, c4, &why));
        CHECK(why.find("step 1") != std::string::npos);

        auto c5 = good;
        std::swap(c5.steps[2].after[0], c5.steps[2].after[1]);
        CHECK(!check_refutation(inst, c5, &why));
        CHECK(why.find("replay") != std::string::npos);

        // an assumption rewrite outside the two assumed equations
        auto c6 = good;
        c6.steps[1].rule = RewriteRule::assumption;
        c6.steps[1].replacement = atom(inst.b_prime(2));
        CHECK(!check_refutation(inst, c6, &why));
    }
}

TEST_CASE("independence family: membership is exactly vanishing") {
    SUBCASE("two steps, two letters") {
        auto inst = build_ip_witness(2, 5, 2, {{0}});
        CHECK(inst.Lbar.dim == 5);  // free rank 3 in class 2 has dimension 6
        CHECK(inst.hall_id.size() == 2);
        CHECK(vec_is_zero(ip_bracket(inst, {0})));
        CHECK(!vec_is_zero(ip_bracket(inst, {1})));
        CHECK(ip_biconditional(inst));
    }
    SUBCASE("three steps separate ordered tuples") {
        auto inst = build_ip_witness(3, 5, 2, {{0, 1}});
        CHECK(inst.Lbar.dim == 54);  // 5 + 10 + 40 minus the one relation
        CHECK(vec_is_zero(ip_bracket(inst, {0, 1})));
        CHECK(!vec_is_zero(ip_bracket(inst, {1, 0})));
        CHECK(!vec_is_zero(ip_bracket(inst, {0, 0})));
        CHECK(ip_biconditional(inst));
    }
    SUBCASE("all subsets of the one-step tuples work") {
        for (int mask = 0; mask < 4; ++mask) {
            std::vector<std::vector<int>> X;
            if (mask & 1) X.push_back({0});
            if (mask & 2) X.push_back({1});
            auto inst = build_ip_witness(2, 5, 2, X);
            CHECK(ip_biconditional(inst));
            CHECK(inst.X.size() == X.size());
        }
        auto inst = build_ip_witness(2, 5, 3, {{2}, {0}, {0}});
        CHECK(inst.X.size() == 2);  // sorted, deduplicated
        CHECK(ip_biconditional(inst));
    }
    SUBCASE("guards") {
        CHECK_THROWS_AS(build_ip_witness(3, 3, 2, {}), std::invalid_argument);
        CHECK_THROWS_AS(build_ip_witness(2, 4, 2, {}), std::invalid_argument);
        CHECK_THROWS_AS(build_ip_witness(2, 5, 2, {{0, 1}}), std::invalid_argument);
        CHECK_THROWS_AS(build_ip_witness(2, 5, 2, {{7}}), std::invalid_argument);
        CHECK_THROWS_AS(build_ip_witness(1, 5, 2, {}), std::invalid_argument);
    }
}

TEST_CASE("flag gadgets") {
    auto H = heisenberg_gadget(1, 1, 2, 5);
    CHECK(H.dim == 3);
    CHECK(H.level(vec_unit(3, 0)) == 2);
    CHECK(H.level(vec_unit(3, 1)) == 1);
    CHECK(H.bracket_basis(1, 2) == vec_unit(3, 0));

    auto H2 = heisenberg_gadget(1, 2, 3, 5);
    CHECK(H2.level(vec_unit(3, 0)) == 3);
    CHECK(H2.level(vec_unit(3, 2)) == 2);

    auto R = level_raiser(1, 3, 5);
    CHECK(R.bracket_basis(0, 1) == vec_unit(3, 2));
    CHECK(R.level(vec_unit(3, 2)) == 2);
    auto R2 = level_raiser(2, 3, 7);
    CHECK(R2.level(vec_unit(3, 0)) == 2);
    CHECK(R2.level(vec_unit(3, 2)) == 3);

    CHECK_THROWS_AS(heisenberg_gadget(2, 2, 3, 5), std::invalid_argument);
    CHECK_THROWS_AS(heisenberg_gadget(0, 1, 2, 5), std::invalid_argument);
    CHECK_THROWS_AS(level_raiser(3, 3, 5), std::invalid_argument);
    CHECK_THROWS_AS(level_raiser(1, 2, 4), std::invalid_argument);
}

TEST_CASE("substructure catalog") {
    auto H = heis(5);
    CHECK(substructure_catalog(H, 0).size() == 1);
    CHECK(substructure_catalog(H, 1).size() == 4);
    auto cat = substructure_catalog(H, 2);
    // zero, three lines, and one pair class: {a,b} and {a,c} are isomorphic
    // and {b,c} is not closed
    CHECK(cat.size() == 5);
    CHECK(cat[0].A.dim == 0);
    CHECK(cat[4].A.dim == 2);
    CHECK_THROWS_AS(substructure_catalog(H, 3), std::invalid_argument);
}

TEST_CASE("extension types") {
    SUBCASE("over the zero algebra") {
        auto Z2 = lla_zero(5, 2);
        CHECK(extension_types(Z2, 1).size() == 2);
        auto two = extension_types(Z2, 2);
        CHECK(two.size() == 3);  // every two-dimensional algebra is abelian
        for (const auto& B : two)
            for (std::size_t s = 0; s < B.dim; ++s)
                for (std::size_t t = s + 1; t < B.dim; ++t)
                    CHECK(vec_is_zero(B.bracket_basis(s, t)));
        auto three = extension_types(lla_zero(5, 2), 3);
        std::size_t nonab = 0;
        for (const auto& B : three) {
            bool ab = true;
            for (std::size_t s = 0; s < B.dim; ++s)
                for (std::size_t t = s + 1; t < B.dim; ++t)
                    if (!vec_is_zero(B.bracket_basis(s, t))) ab = false;
            if (!ab) ++nonab;
        }
        CHECK(three.size() == 5);
        CHECK(nonab == 1);  // the bracket pair, unique up to scaling
    }
    SUBCASE("over a base, coefficients collapse under pinned isomorphism") {
        auto H = heis(5);
        auto types = extension_types(H, 1);
        // one new level-1 generator: its products with b and c can be
        // absorbed by shifting the generator inside level 1
        CHECK(types.size() == 2);
        for (const auto& B : types) CHECK(B.dim == 4);
    }
    SUBCASE("a base whose flag is not spanned by its own basis is rejected") {
        Lla A;
        A.p = 5;
        A.c = 2;
        A.dim = 2;
        A.sc = {vec_zero(2)};
        A.flag = {Mat(5, 0, 2), Mat::identity(5, 2), Mat::from_rows(5, 2, {{1, 1}}), Mat(5, 0, 2)};
        REQUIRE(!validate(A));
        CHECK_THROWS_AS(extension_types(A, 1), std::invalid_argument);
    }
}

TEST_CASE("witness search inside a fixed ambient") {
    auto H = heis(5);
    SUBCASE("the gadget is found over its own center line") {
        Mat rows = Mat::from_rows(5, 3, {vec_unit(3, 0)});
        auto emb = find_witness(H, rows, heisenberg_gadget(1, 1, 2, 5));
        REQUIRE(emb.has_value());
        CHECK(!embedding_violation(heisenberg_gadget(1, 1, 2, 5), H, *emb));
        CHECK(emb->row(0) == vec_unit(3, 0));
    }
    SUBCASE("no gadget lives in an abelian ambient") {
        Lla A = lla_from_levels(5, 2, std::vector<Vec>(3, vec_zero(3)), {2, 1, 1});
        Mat rows = Mat::from_rows(5, 3, {vec_unit(3, 0)});
        CHECK(!find_witness(A, rows, heisenberg_gadget(1, 1, 2, 5)).has_value());
    }
    SUBCASE("a level-2 commuting partner of b does not exist in the gadget") {
        // blev (1, 2) over the line b: the partner must be central of level 2
        Lla B = lla_from_levels(5, 2, std::vector<Vec>(1, vec_zero(2)), {1, 2}, {"b", "g"});
        Mat rows = Mat::from_rows(5, 3, {vec_unit(3, 1)});
        auto emb = find_witness(H, rows, B);
        REQUIRE(emb.has_value());  // a itself serves
        CHECK(!embedding_violation(B, H, *emb));
    }
    SUBCASE("misdeclared bases are rejected") {
        // rows {b, c} bracket to a, outside their own span
        Mat rows = Mat::from_rows(5, 3, {vec_unit(3, 1), vec_unit(3, 2)});
        Lla B = lla_from_levels(5, 2, std::vector<Vec>(1, vec_zero(2)), {1, 1});
        CHECK_THROWS_AS(find_witness(H, rows, B), std::invalid_argument);
        // level mismatch: the a line declared as level 1
        Mat arow = Mat::from_rows(5, 3, {vec_unit(3, 0)});
        Lla B2 = lla_from_levels(5, 2, {}, std::vector<int>{1});
        CHECK_THROWS_AS(find_witness(H, arow, B2), std::invalid_argument);
    }
}

TEST_CASE("saturation rounds over p = 5 in class 2") {
    auto r1 = generic_round(lla_zero(5, 2), 2);
    CHECK(r1.out.dim == 6);
    CHECK(r1.added == 3);
    CHECK(r1.tasks.size() == 5);
    CHECK(!r1.tasks[0].witnessed);
    CHECK(!r1.tasks[1].witnessed);
    CHECK(!r1.tasks[2].witnessed);
    CHECK(r1.tasks[3].witnessed);
    CHECK(r1.tasks[4].witnessed);

    auto r2 = generic_round(r1.out, 2);
    CHECK(r2.out.dim == 9);
    CHECK(r2.added == 1);

    // the previous round's algebra persists on the leading coordinates
    for (std::size_t i = 0; i < r1.out.dim; ++i)
        for (std::size_t j = i + 1; j < r1.out.dim; ++j) {
            Vec q = r2.out.sc_at(i, j);
            Vec old = r1.out.sc_at(i, j);
            old.resize(r2.out.dim, 0);
            CHECK(q == old);
        }
    for (std::size_t i = 0; i < r1.out.dim; ++i) CHECK(r2.out.label(i) == r1.out.label(i));

    auto r3 = generic_round(r2.out, 2);
    CHECK(r3.added == 0);
    CHECK(lla_equal(r3.out, r2.out));
    for (const auto& t : r3.tasks) {
        CHECK(t.witnessed);
        CHECK(!embedding_violation(t.B, r3.out, t.emb));
    }

    // catalog of the first round's output: zero, six lines, three pair classes
    CHECK(substructure_catalog(r1.out, 2).size() == 10);
}

TEST_CASE("saturation with budget one and budget three") {
    auto r = generic_round(lla_zero(5, 2), 1);
    CHECK(r.out.dim == 2);
    CHECK(r.added == 2);
    CHECK(r.tasks.size() == 2);

    auto r3 = generic_round(lla_zero(5, 2), 3);
    CHECK(r3.tasks.size() == 10);
    CHECK(r3.added == 4);
    CHECK(r3.out.dim == 18);
    // the bracket-pair type is witnessed against material added earlier in
    // the same round
    int nonab_witnessed = 0;
    for (const auto& t : r3.tasks) {
        bool ab = true;
        for (std::size_t s = 0; s < t.B.dim; ++s)
            for (std::size_t u = s + 1; u < t.B.dim; ++u)
                if (!vec_is_zero(t.B.bracket_basis(s, u))) ab = false;
        if (!ab && t.witnessed) ++nonab_witnessed;
    }
    CHECK(nonab_witnessed == 1);

    CHECK_THROWS_AS(generic_round(lla_zero(5, 2), 0), std::invalid_argument);
    CHECK_THROWS_AS(generic_round(lla_zero(5, 2), 4), std::invalid_argument);
    CHECK_THROWS_AS(generic_round(lla_zero(11, 2), 2), std::invalid_argument);
}

TEST_CASE("class-2 axiom scan") {
    SUBCASE("abelian: nothing violated, existentials pending") {
        Lla A = lla_from_levels(5, 2, std::vector<Vec>(3, vec_zero(3)), {1, 1, 1});
        auto rep = t2p_axiom_check(A);
        CHECK(rep.ok());
        CHECK(rep.commutator_witnessed == 0);
        CHECK(!rep.pending.empty());
    }
    SUBCASE("the gadget satisfies every sampled axiom") {
        auto rep = t2p_axiom_check(heis(5));
        CHECK(rep.ok());
        CHECK(rep.pending.empty());
        CHECK(rep.commutator_checks > 0);
        CHECK(rep.commutator_witnessed == rep.commutator_checks);
        CHECK(rep.solve_witnessed == rep.solve_checks);
    }
    SUBCASE("a broken table is reported as violated") {
        Lla L;
        L.p = 5;
        L.c = 2;
        L.dim = 2;
        L.sc = {vec_unit(2, 1)};
        L.flag = {Mat(5, 0, 2), Mat::identity(5, 2), Mat(5, 0, 2), Mat(5, 0, 2)};
        auto rep = t2p_axiom_check(L);
        CHECK(!rep.ok());
    }
    SUBCASE("saturation output stays clean") {
        auto r1 = generic_round(lla_zero(5, 2), 2);
        auto r2 = generic_round(r1.out, 2);
        auto rep = t2p_axiom_check(r2.out);
        CHECK(rep.ok());
    }
    CHECK_THROWS_AS(t2p_axiom_check(lla_zero(5, 3)), std::invalid_argument);
}
