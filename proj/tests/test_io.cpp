#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "lazlie/hall.hpp"
#include "lazlie/io.hpp"
#include "lazlie/witnesses.hpp"
#include "support/gen.hpp"

using namespace lazlie;

namespace {

int error_line(const std::string& text, bool bilinear = false) {
    try {
        if (bilinear)
            parse_bilinear(text);
        else
            parse_lla(text);
    } catch (const ParseError& e) {
        return e.line;
    }
    return -1;
}

}  // namespace

TEST_CASE("parsing the flag-gadget file") {
    std::string text =
        "lla p=5 c=2 dim=3\n"
        "labels a b c\n"
        "levels 2 1 1\n"
        "bracket 2 3 -> 1:1\n";
    Lla L = parse_lla(text);
    CHECK(L.p == 5);
    CHECK(L.c == 2);
    CHECK(L.dim == 3);
    CHECK(L.labels == std::vector<std::string>{"a", "b", "c"});
    CHECK(L.level(vec_unit(3, 0)) == 2);
    CHECK(L.bracket_basis(1, 2) == vec_unit(3, 0));
    CHECK(L.bracket_basis(2, 1) == vec_scale(4, vec_unit(3, 0), 5));
    CHECK(validate(L) == std::nullopt);
    CHECK(serialize_lla(L) == text);
}

TEST_CASE("defaults, comments and spacing") {
    Lla A = parse_lla("lla p=7 c=3 dim=2\n");
    CHECK(A.dim == 2);
    CHECK(A.labels.empty());
    CHECK(A.level(vec_unit(2, 0)) == 1);
    CHECK(vec_is_zero(A.bracket_basis(0, 1)));
    CHECK(validate(A) == std::nullopt);

    Lla B = parse_lla(
        "# a gadget, annotated\n"
        "\n"
        "lla   p=5  c=2   dim=3   # header\n"
        "levels 2 1 1\n"
        "   bracket 2 3 ->   1:1   # the only product\n");
    CHECK(B.dim == 3);
    CHECK(B.bracket_basis(1, 2) == vec_unit(3, 0));

    // canonical form normalizes spacing and adds the levels line
    CHECK(serialize_lla(A) == "lla p=7 c=3 dim=2\nlevels 1 1\n");
    CHECK(serialize_lla(B) ==
          "lla p=5 c=2 dim=3\nlevels 2 1 1\nbracket 2 3 -> 1:1\n");
}

TEST_CASE("explicit flag rows when levels cannot span the flag") {
    Lla L;
    L.p = 5;
    L.c = 2;
    L.dim = 2;
    L.sc = {vec_zero(2)};
    L.flag.assign(4, Mat(5, 0, 2));
    L.flag[1] = Mat::identity(5, 2);
    L.flag[2].append_row(Vec{1, 1});
    REQUIRE(validate(L) == std::nullopt);

    std::string text = serialize_lla(L);
    CHECK(text == "lla p=5 c=2 dim=2\nflag 2 : 1 1\n");
    Lla back = parse_lla(text);
    CHECK(lla_equal(back, L));
    CHECK(serialize_lla(back) == text);

    // a diagonal flag line round-trips through the levels form instead
    Lla D = parse_lla("lla p=5 c=2 dim=2\nflag 2 : 0 1\n");
    CHECK(D.level(vec_unit(2, 1)) == 2);
    CHECK(serialize_lla(D) == "lla p=5 c=2 dim=2\nlevels 1 2\n");
}

TEST_CASE("round trips over generated algebras") {
    std::vector<Lla> pool;
    pool.push_back(FreeLie({1, 1}, 3, 5).to_lla());
    pool.push_back(FreeLie({1, 2}, 3, 7).to_lla());
    pool.push_back(build_sop3(2, 5).V);
    pool.push_back(heisenberg_gadget(1, 1, 2, 5));
    pool.push_back(level_raiser(2, 3, 5));
    pool.push_back(lla_zero(5, 2));
    Rng rng(77);
    for (u64 s = 0; s < 6; ++s) pool.push_back(gen::random_lla(rng, 5, 3, 9));

    for (const Lla& L : pool) {
        std::string text = serialize_lla(L);
        Lla back = parse_lla(text);
        CHECK(lla_equal(back, L));
        CHECK(back.labels == L.labels);
        CHECK(serialize_lla(back) == text);
    }
}

TEST_CASE("parse errors carry line numbers") {
    CHECK(error_line("") == 1);
    CHECK(error_line("free p=5 c=2 dim=3\n") == 1);
    CHECK(error_line("lla p=4 c=2 dim=3\n") == 1);
    CHECK(error_line("lla p=5 c=0 dim=3\n") == 1);
    CHECK(error_line("lla p=5 c=2\n") == 1);
    CHECK(error_line("lla p=5 c=2 dim=x\n") == 1);
    CHECK(error_line("lla p=5 c=2 dim=3\nlevels 1 1\n") == 2);
    CHECK(error_line("lla p=5 c=2 dim=3\nlevels 1 1 3\n") == 2);
    CHECK(error_line("lla p=5 c=2 dim=3\n# fine\nlevels 1 1 1\nlevels 1 1 1\n") == 4);
    CHECK(error_line("lla p=5 c=2 dim=3\nlabels a b\n") == 2);
    CHECK(error_line("lla p=5 c=2 dim=3\nbracket 3 2 -> 1:1\n") == 2);
    CHECK(error_line("lla p=5 c=2 dim=3\nbracket 2 3 -> 1:0\n") == 2);
    CHECK(error_line("lla p=5 c=2 dim=3\nbracket 2 3 -> 4:1\n") == 2);
    CHECK(error_line("lla p=5 c=2 dim=3\nbracket 2 3 -> 1:1 1:2\n") == 2);
    CHECK(error_line("lla p=5 c=2 dim=3\nbracket 2 3 -> 1:1\nbracket 2 3 -> 2:1\n") == 3);
    CHECK(error_line("lla p=5 c=2 dim=3\nbasis a b c\n") == 2);
    CHECK(error_line("lla p=5 c=2 dim=3\nflag 1 : 1 0 0\n") == 2);
    CHECK(error_line("lla p=5 c=2 dim=3\nflag 2 : 1 0\n") == 2);
    CHECK(error_line("lla p=5 c=2 dim=3\nflag 2 : 1 0 7\n") == 2);
    CHECK(error_line("lla p=5 c=2 dim=3\nlevels 1 1 1\nflag 2 : 0 0 1\n") == 3);
    CHECK(error_line("lla p=5 c=2 dim=3\nflag 2 : 0 0 1\nlevels 1 1 1\n") == 3);

    // the what() text names the line too
    try {
        parse_lla("lla p=5 c=2 dim=3\nbracket 2 3 ->> 1:1\n");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("bilinear blocks") {
    std::string text =
        "bilinear p=5 dv=2 dw=1\n"
        "beta 1 2 -> 1:1\n";
    BilinearStruct B = parse_bilinear(text);
    CHECK(B.p == 5);
    CHECK(B.dv == 2);
    CHECK(B.dw == 1);
    CHECK(B.beta_at(0, 1) == Vec{1});
    CHECK(validate(B) == std::nullopt);
    CHECK(serialize_bilinear(B) == text);

    BilinearStruct Z = parse_bilinear("bilinear p=3 dv=4 dw=2\n");
    CHECK(Z.beta.size() == 6);
    for (const Vec& row : Z.beta) CHECK(vec_is_zero(row));

    Rng rng(5);
    for (int s = 0; s < 5; ++s) {
        BilinearStruct R(7, 3, 2);
        for (auto& row : R.beta) row = rng.vec(2, 7);
        BilinearStruct back = parse_bilinear(serialize_bilinear(R));
        CHECK(bilinear_equal(back, R));
    }

    CHECK(error_line("bilinear p=5 dv=2\n", true) == 1);
    CHECK(error_line("bilinear p=5 dv=2 dw=1\nbeta 2 1 -> 1:1\n", true) == 2);
    CHECK(error_line("bilinear p=5 dv=2 dw=1\nbeta 1 2 -> 2:1\n", true) == 2);
    CHECK(error_line("bilinear p=5 dv=2 dw=1\nbracket 1 2 -> 1:1\n", true) == 2);
    CHECK(error_line("bilinear p=5 dv=2 dw=1\nbeta 1 2 -> 1:1\nbeta 1 2 -> 1:2\n",
                     true) == 3);
}
