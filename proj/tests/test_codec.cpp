#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "psrc/codec.hpp"
#include "psrc/piece_io.hpp"

using namespace psrc;

namespace {

object_data random_object(int B, std::size_t L, std::mt19937_64& rng) {
    object_data obj;
    obj.fragments.assign(static_cast<std::size_t>(B), std::vector<std::uint8_t>(L));
    for (auto& f : obj.fragments)
        for (auto& byte : f) byte = static_cast<std::uint8_t>(rng());
    return obj;
}

std::vector<piece> pieces_of(const std::vector<node_pieces>& nodes,
                             const std::vector<int>& node_ids) {
    std::vector<piece> out;
    for (int id : node_ids)
        for (const auto& pc : nodes[static_cast<std::size_t>(id - 1)].pieces) out.push_back(pc);
    return out;
}

}  // namespace

TEST_CASE("encode matches the worked PSRC(5,2) example") {
    auto lay = build_layout(4, 2);
    std::mt19937_64 rng(1);
    auto obj = random_object(4, 16, rng);
    auto nodes = encode(lay, obj);
    // N_3 stores {o3, o1+o2+o4}
    const auto& n3 = nodes[2];
    CHECK(n3.pieces[0].payload == obj.fragments[2]);
    std::vector<std::uint8_t> expect = obj.fragments[0];
    xor_into(expect, obj.fragments[1]);
    xor_into(expect, obj.fragments[3]);
    CHECK(n3.pieces[1].payload == expect);
}

TEST_CASE("all-zero object encodes to all-zero payloads") {
    auto lay = build_layout(4, 2);
    object_data obj;
    obj.fragments.assign(4, std::vector<std::uint8_t>(8, 0));
    for (const auto& np : encode(lay, obj))
        for (const auto& pc : np.pieces)
            CHECK(pc.payload == std::vector<std::uint8_t>(8, 0));
}

TEST_CASE("payloads equal independent per-bit-plane recomputation") {
    auto lay = build_layout(6, 2);
    std::mt19937_64 rng(2);
    auto obj = random_object(6, 1, rng);
    auto nodes = encode(lay, obj);
    for (const auto& np : nodes) {
        for (const auto& pc : np.pieces) {
            for (int bit = 0; bit < 8; ++bit) {
                int expect = 0;
                for (int i = 0; i < 6; ++i)
                    if (pc.coeff.get(i)) expect ^= (obj.fragments[static_cast<std::size_t>(i)][0] >> bit) & 1;
                CHECK(((pc.payload[0] >> bit) & 1) == expect);
            }
        }
    }
}

TEST_CASE("encode rejects malformed objects") {
    auto lay = build_layout(4, 2);
    object_data obj;
    obj.fragments.assign(3, std::vector<std::uint8_t>(4, 0));
    CHECK_THROWS_AS(encode(lay, obj), error);
    obj.fragments.assign(4, std::vector<std::uint8_t>{});
    CHECK_THROWS_AS(encode(lay, obj), error);
    obj.fragments.assign(4, std::vector<std::uint8_t>(4, 0));
    obj.fragments[2].resize(3);
    CHECK_THROWS_AS(encode(lay, obj), error);
}

TEST_CASE("decode from two nodes of PSRC(5,2)") {
    auto lay = build_layout(4, 2);
    std::mt19937_64 rng(3);
    auto obj = random_object(4, 32, rng);
    auto nodes = encode(lay, obj);
    auto res = decode(lay, pieces_of(nodes, {1, 2}));
    REQUIRE(res.object.has_value());
    CHECK(*res.object == obj);
    // single node: rank alpha only
    res = decode(lay, pieces_of(nodes, {4}));
    CHECK(!res.object.has_value());
    CHECK(res.rank == 2);
}

TEST_CASE("k=2 MDS: every node pair of PSRC(5,2) decodes") {
    auto lay = build_layout(4, 2);
    std::mt19937_64 rng(4);
    auto obj = random_object(4, 8, rng);
    auto nodes = encode(lay, obj);
    for (int i = 1; i <= 5; ++i)
        for (int j = i + 1; j <= 5; ++j) {
            auto res = decode(lay, pieces_of(nodes, {i, j}));
            REQUIRE(res.object.has_value());
            CHECK(*res.object == obj);
        }
}

TEST_CASE("random 3-node subsets of PSRC(21,3) decode unless rank-deficient") {
    auto lay = build_layout(6, 2);
    std::mt19937_64 rng(5);
    auto obj = random_object(6, 4, rng);
    auto nodes = encode(lay, obj);
    int deficient = 0;
    for (int t = 0; t < 500; ++t) {
        std::set<int> pick;
        while (pick.size() < 3) pick.insert(1 + static_cast<int>(rng() % 21));
        auto res = decode(lay, pieces_of(nodes, std::vector<int>(pick.begin(), pick.end())));
        if (res.object) {
            CHECK(*res.object == obj);
        } else {
            CHECK(res.rank < 6);
            ++deficient;
        }
    }
    CHECK(deficient < 500);  // most subsets succeed (1 - rho_3 ~ 0.15)
}

TEST_CASE("a rank-deficient 5-node group is Unrecoverable") {
    auto lay = build_layout(6, 2);
    // find one of the bad groups by direct search
    std::vector<int> bad;
    std::vector<int> comb{1, 2, 3, 4, 5};
    auto group_rank = [&](const std::vector<int>& g) {
        std::vector<bitvec> rows;
        for (int id : g)
            for (const auto& v : lay.node_basis(id)) rows.push_back(v);
        return rank(rows);
    };
    for (int a = 1; a <= 21 && bad.empty(); ++a)
        for (int b = a + 1; b <= 21 && bad.empty(); ++b)
            for (int c = b + 1; c <= 21 && bad.empty(); ++c)
                for (int d = c + 1; d <= 21 && bad.empty(); ++d)
                    for (int e = d + 1; e <= 21 && bad.empty(); ++e)
                        if (group_rank({a, b, c, d, e}) < 6) bad = {a, b, c, d, e};
    REQUIRE(!bad.empty());
    std::mt19937_64 rng(6);
    auto obj = random_object(6, 4, rng);
    auto nodes = encode(lay, obj);
    auto res = decode(lay, pieces_of(nodes, bad));
    CHECK(!res.object.has_value());
    // a deficient group's node spans are nested GF(4)-lines, so the pooled
    // GF(2) span has even dimension: rank 4, not 5
    CHECK(res.rank == group_rank(bad));
    CHECK(res.rank == 4);
}

TEST_CASE("decode detects contradictory payloads") {
    auto lay = build_layout(4, 2);
    std::mt19937_64 rng(7);
    auto obj = random_object(4, 8, rng);
    auto nodes = encode(lay, obj);
    auto pieces = pieces_of(nodes, {1, 2, 3});
    pieces.back().payload[0] ^= 0xFF;  // corrupt a dependent piece
    CHECK_THROWS_WITH_AS(decode(lay, pieces), doctest::Contains("InconsistentPieces"), error);
}

TEST_CASE("encoding is linear in the object") {
    auto lay = build_layout(6, 2);
    std::mt19937_64 rng(8);
    for (int t = 0; t < 10; ++t) {
        auto a = random_object(6, 8, rng);
        auto b = random_object(6, 8, rng);
        object_data sum = a;
        for (std::size_t i = 0; i < sum.fragments.size(); ++i)
            xor_into(sum.fragments[i], b.fragments[i]);
        auto ea = encode(lay, a), eb = encode(lay, b), es = encode(lay, sum);
        for (std::size_t l = 0; l < ea.size(); ++l)
            for (std::size_t j = 0; j < ea[l].pieces.size(); ++j) {
                auto x = ea[l].pieces[j].payload;
                xor_into(x, eb[l].pieces[j].payload);
                CHECK(x == es[l].pieces[j].payload);
            }
    }
}

TEST_CASE("systematic map points at the unit-vector pieces") {
    auto lay = build_layout(6, 2);
    auto smap = systematic_map(lay);
    CHECK(smap[0].node_id == 1);
    CHECK(smap[0].piece_idxs == std::vector<int>{0});
    CHECK(smap[2].node_id == 3);
    CHECK(smap[2].piece_idxs == std::vector<int>{0});
    CHECK(smap[5].node_id == 6);
    CHECK(smap[5].piece_idxs == std::vector<int>{0});

    auto smap5 = systematic_map(build_layout(4, 2));
    CHECK(smap5[3].node_id == 4);
    CHECK(smap5[3].piece_idxs == std::vector<int>{0});
}

TEST_CASE("systematic retrieval fetches B pieces from distinct nodes") {
    auto lay = build_layout(6, 2);
    std::mt19937_64 rng(9);
    auto obj = random_object(6, 16, rng);
    auto nodes = encode(lay, obj);
    int fetched = 0;
    std::set<int> contacted;
    piece_oracle fetch = [&](int node, int idx) -> std::optional<piece> {
        ++fetched;
        contacted.insert(node);
        return nodes[static_cast<std::size_t>(node - 1)].pieces[static_cast<std::size_t>(idx)];
    };
    auto got = retrieve_systematic(lay, fetch);
    CHECK(got == obj);
    CHECK(fetched == 6);
    CHECK(contacted.size() == 6);
}

TEST_CASE("systematic retrieval reports missing fragments") {
    auto lay = build_layout(6, 2);
    std::mt19937_64 rng(10);
    auto obj = random_object(6, 4, rng);
    auto nodes = encode(lay, obj);
    piece_oracle fetch = [&](int node, int idx) -> std::optional<piece> {
        if (node == 1) return std::nullopt;  // N_1 dead
        return nodes[static_cast<std::size_t>(node - 1)].pieces[static_cast<std::size_t>(idx)];
    };
    try {
        retrieve_systematic(lay, fetch);
        FAIL("expected node_unavailable_error");
    } catch (const node_unavailable_error& e) {
        CHECK(e.missing_fragments() == std::vector<int>{0});  // fragment o_1
    }
}

TEST_CASE("object split/join and piece file round-trip") {
    std::vector<std::uint8_t> bytes{1, 2, 3, 4, 5, 6, 7};
    auto obj = split_object(bytes, 4);  // pads to 4 x 2
    CHECK(obj.fragment_len() == 2);
    CHECK(join_object(obj, bytes.size()) == bytes);
    CHECK_THROWS_AS(split_object({}, 4), error);

    piece_file pf{piece{bitvec::parse("0110"), {0xAB, 0x00, 0xFF}}, 7, fnv1a64(bytes)};
    std::stringstream ss;
    write_piece(ss, pf);
    auto back = read_piece(ss);
    CHECK(back.pc == pf.pc);
    CHECK(back.object_size == 7);
    CHECK(back.digest == pf.digest);
}
