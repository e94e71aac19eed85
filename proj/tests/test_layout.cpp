#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "doctest.h"
#include "psrc/layout.hpp"

using namespace psrc;

namespace {

std::vector<bitvec> parse_basis(const std::string& a, const std::string& b) {
    return {bitvec::parse(a), bitvec::parse(b)};
}

}  // namespace

TEST_CASE("derive_params") {
    auto p = derive_params(4, 2);
    CHECK(p.n == 5);
    CHECK(p.k == 2);
    p = derive_params(6, 2);
    CHECK(p.n == 21);
    CHECK(p.k == 3);
    p = derive_params(6, 3);
    CHECK(p.n == 9);
    p = derive_params(8, 2);
    CHECK(p.n == 85);
    p = derive_params(8, 4);
    CHECK(p.n == 17);
    CHECK(p.k == 2);
    CHECK_THROWS_WITH_AS(derive_params(6, 4), doctest::Contains("DivisibilityViolation"),
                         error);
}

TEST_CASE("subfield generator") {
    gf2m g4(4);
    CHECK(subfield_generator(g4, 2) == bitvec::parse("0110"));  // omega = nu^5
    CHECK(subfield_generator(g4, 4) == g4.generator());         // single coset
    gf2m g6(6);
    CHECK(subfield_generator(g6, 2) == bitvec::parse("110111"));  // nu^21
    CHECK_THROWS_AS(subfield_generator(g6, 4), error);
    // omega has order 2^alpha - 1 and {1, omega} is independent
    bitvec w = subfield_generator(g6, 2);
    CHECK(g6.pow(w, 3) == g6.one());
    CHECK(g6.pow(w, 1) != g6.one());
    CHECK(rank(std::vector<bitvec>{g6.one(), w}) == 2);
}

TEST_CASE("golden layout: PSRC(5,2) reproduces the worked example") {
    auto lay = build_layout(4, 2);
    CHECK(lay.node_basis(1) == parse_basis("1000", "0110"));
    CHECK(lay.node_basis(2) == parse_basis("0100", "0011"));
    CHECK(lay.node_basis(3) == parse_basis("0010", "1101"));
    CHECK(lay.node_basis(4) == parse_basis("0001", "1010"));
    CHECK(lay.node_basis(5) == parse_basis("1100", "0101"));
}

TEST_CASE("golden layout: PSRC(21,3) reproduces all 42 vectors") {
    static const char* golden[21][2] = {
        {"100000", "110111"}, {"010000", "101011"}, {"001000", "100101"},
        {"000100", "100010"}, {"000010", "010001"}, {"000001", "111000"},
        {"110000", "011100"}, {"011000", "001110"}, {"001100", "000111"},
        {"000110", "110011"}, {"000011", "101001"}, {"110001", "100100"},
        {"101000", "010010"}, {"010100", "001001"}, {"001010", "110100"},
        {"000101", "011010"}, {"110010", "001101"}, {"011001", "110110"},
        {"111100", "011011"}, {"011110", "111101"}, {"001111", "101110"},
    };
    auto lay = build_layout(6, 2);
    for (int l = 1; l <= 21; ++l)
        CHECK(lay.node_basis(l) ==
              parse_basis(golden[l - 1][0], golden[l - 1][1]));
}

TEST_CASE("spread property holds for all tabulated parameters") {
    for (auto [B, alpha] : {std::pair{4, 2}, {6, 2}, {6, 3}, {8, 2}, {8, 4}}) {
        auto lay = build_layout(B, alpha);
        CHECK(lay.n() == derive_params(B, alpha).n);
        auto rep = verify_spread(lay);
        CHECK(rep.ok);
        CHECK(rep.violations.empty());
    }
}

TEST_CASE("each node's basis XOR stays inside its own span") {
    auto lay = build_layout(6, 3);
    for (int l = 1; l <= lay.n(); ++l) {
        bitvec sum = bitvec::zero(lay.B());
        for (const auto& v : lay.node_basis(l)) sum ^= v;
        CHECK(lay.node_covers(l, sum));
    }
}

TEST_CASE("distinct node spans intersect only in zero") {
    for (auto [B, alpha] : {std::pair{4, 2}, {6, 2}, {6, 3}, {8, 2}, {8, 4}}) {
        auto lay = build_layout(B, alpha);
        for (int i = 1; i <= lay.n(); ++i) {
            for (int j = i + 1; j <= lay.n(); ++j) {
                std::vector<bitvec> both = lay.node_basis(i);
                for (const auto& v : lay.node_basis(j)) both.push_back(v);
                CHECK(rank(both) == 2 * alpha);  // direct sum
            }
        }
    }
}

TEST_CASE("verify_spread flags corrupted layouts") {
    auto params = derive_params(4, 2);
    auto good = build_layout(params);
    auto bases = good.node_bases();

    SUBCASE("duplicated vector across nodes") {
        bases[1][0] = bases[0][0];
        spread_layout bad(params, bases);
        auto rep = verify_spread(bad);
        CHECK(!rep.ok);
        bool found = false;
        for (const auto& v : rep.violations)
            if (v.find("covered twice") != std::string::npos) found = true;
        CHECK(found);
    }
    SUBCASE("dependent basis") {
        bases[2][1] = bases[2][0];
        spread_layout bad(params, bases);
        auto rep = verify_spread(bad);
        CHECK(!rep.ok);
        bool found = false;
        for (const auto& v : rep.violations)
            if (v.find("rank < alpha") != std::string::npos) found = true;
        CHECK(found);
    }
}

TEST_CASE("layout file round-trip") {
    auto lay = build_layout(6, 2);
    std::stringstream ss;
    write_layout(ss, lay);
    auto back = read_layout(ss);
    CHECK(back.params() == lay.params());
    for (int l = 1; l <= lay.n(); ++l) CHECK(back.node_basis(l) == lay.node_basis(l));

    std::stringstream bad("psrc B=6 alpha=2 n=20 poly=43\n");
    CHECK_THROWS_AS(read_layout(bad), error);
}
