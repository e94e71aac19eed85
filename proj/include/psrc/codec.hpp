#ifndef PSRC_CODEC_HPP
#define PSRC_CODEC_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "psrc/layout.hpp"

namespace psrc {

// Object split into B equal-length fragments; fragment i carries the
// object symbol o_i lifted to L bytes.
struct object_data {
    std::vector<std::vector<std::uint8_t>> fragments;

    std::size_t fragment_len() const { return fragments.empty() ? 0 : fragments.front().size(); }

    friend bool operator==(const object_data&, const object_data&) = default;
};

// One stored unit: coefficient mask v plus the XOR of the fragments it
// selects.
struct piece {
    bitvec coeff;
    std::vector<std::uint8_t> payload;

    friend bool operator==(const piece&, const piece&) = default;
};

struct node_pieces {
    int node_id = 0;  // 1..n
    std::vector<piece> pieces;

    friend bool operator==(const node_pieces&, const node_pieces&) = default;
};

inline void xor_into(std::vector<std::uint8_t>& acc, const std::vector<std::uint8_t>& src) {
    if (acc.size() != src.size())
        throw error(errc::fragment_length_mismatch, "payload length mismatch");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] ^= src[i];
}

// Splits raw bytes into B fragments of equal length, zero-padding the tail.
inline object_data split_object(const std::vector<std::uint8_t>& bytes, int B) {
    if (bytes.empty())
        throw error(errc::fragment_length_mismatch, "empty object");
    const std::size_t L = (bytes.size() + static_cast<std::size_t>(B) - 1) / B;
    object_data obj;
    obj.fragments.assign(static_cast<std::size_t>(B), std::vector<std::uint8_t>(L, 0));
    for (std::size_t i = 0; i < bytes.size(); ++i)
        obj.fragments[i / L][i % L] = bytes[i];
    return obj;
}

inline std::vector<std::uint8_t> join_object(const object_data& obj, std::size_t true_size) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(obj.fragments.size() * obj.fragment_len());
    for (const auto& f : obj.fragments) bytes.insert(bytes.end(), f.begin(), f.end());
    if (true_size > bytes.size())
        throw error(errc::dimension_mismatch, "recorded size exceeds decoded data");
    bytes.resize(true_size);
    return bytes;
}

inline std::vector<std::uint8_t> combine_fragments(const object_data& obj, const bitvec& coeff) {
    std::vector<std::uint8_t> payload(obj.fragment_len(), 0);
    for (int i = 0; i < coeff.width(); ++i)
        if (coeff.get(i)) xor_into(payload, obj.fragments[static_cast<std::size_t>(i)]);
    return payload;
}

// Pure XOR encoding: node l's pieces are the fragment combinations
// selected by its basis vectors.
inline std::vector<node_pieces> encode(const spread_layout& layout, const object_data& obj) {
    if (static_cast<int>(obj.fragments.size()) != layout.B())
        throw error(errc::dimension_mismatch,
                    "object has " + std::to_string(obj.fragments.size()) +
                        " fragments, layout B=" + std::to_string(layout.B()));
    const std::size_t L = obj.fragment_len();
    if (L == 0) throw error(errc::fragment_length_mismatch, "zero-length fragments");
    for (const auto& f : obj.fragments)
        if (f.size() != L)
            throw error(errc::fragment_length_mismatch, "unequal fragment lengths");

    std::vector<node_pieces> out;
    out.reserve(static_cast<std::size_t>(layout.n()));
    for (int l = 1; l <= layout.n(); ++l) {
        node_pieces np;
        np.node_id = l;
        for (const auto& v : layout.node_basis(l))
            np.pieces.push_back(piece{v, combine_fragments(obj, v)});
        out.push_back(std::move(np));
    }
    return out;
}

struct decode_result {
    std::optional<object_data> object;  // set iff rank == B
    int rank = 0;
};

// Solves the GF(2) system coeff * o = payload by elimination on
// (coeff row | payload) pairs. Rank-B systems with contradictory
// payloads throw InconsistentPieces.
inline decode_result decode_pieces(int B, const std::vector<piece>& pieces) {
    if (pieces.empty())
        throw error(errc::dimension_mismatch, "no pieces to decode");
    const std::size_t L = pieces.front().payload.size();
    for (const auto& pc : pieces) {
        if (pc.coeff.width() != B)
            throw error(errc::dimension_mismatch, "piece coeff width != B");
        if (pc.payload.size() != L)
            throw error(errc::fragment_length_mismatch, "piece payload lengths differ");
    }

    struct row {
        std::uint32_t v = 0;
        std::vector<std::uint8_t> payload;
    };
    std::vector<row> rows(static_cast<std::size_t>(B));
    int rk = 0;
    for (const auto& pc : pieces) {
        std::uint32_t v = pc.coeff.bits();
        std::vector<std::uint8_t> payload = pc.payload;
        bool became_pivot = false;
        while (v != 0) {
            auto& r = rows[static_cast<std::size_t>(std::countr_zero(v))];
            if (r.v == 0) {
                r.v = v;
                r.payload = std::move(payload);
                v = 0;
                became_pivot = true;
                ++rk;
            } else {
                v ^= r.v;
                xor_into(payload, r.payload);
            }
        }
        if (!became_pivot) {
            // fully reduced coefficient: payload must be zero too
            for (std::uint8_t byte : payload)
                if (byte != 0)
                    throw error(errc::inconsistent_pieces,
                                "dependent piece with contradictory payload");
        }
    }
    decode_result res;
    res.rank = rk;
    if (rk < B) return res;

    // Back-substitute to unit rows: rows[j] then holds fragment j.
    for (int j = B - 1; j >= 0; --j) {
        auto& r = rows[static_cast<std::size_t>(j)];
        for (int i = 0; i < j; ++i) {
            auto& lower = rows[static_cast<std::size_t>(i)];
            if ((lower.v >> j) & 1u) {
                lower.v ^= r.v;
                xor_into(lower.payload, r.payload);
            }
        }
    }
    object_data obj;
    obj.fragments.reserve(static_cast<std::size_t>(B));
    for (auto& r : rows) obj.fragments.push_back(std::move(r.payload));
    res.object = std::move(obj);
    return res;
}

inline decode_result decode(const spread_layout& layout, const std::vector<piece>& pieces) {
    return decode_pieces(layout.B(), pieces);
}

// Where each canonical unit vector e_i lives: either directly as a stored
// basis vector, or as an XOR of pieces within the one node whose subspace
// covers e_i.
struct systematic_entry {
    int fragment = 0;              // 0-based fragment index i
    int node_id = 0;               // covering node
    std::vector<int> piece_idxs;   // pieces to XOR; size 1 means stored directly
};

inline std::vector<systematic_entry> systematic_map(const spread_layout& layout) {
    std::vector<systematic_entry> out;
    out.reserve(static_cast<std::size_t>(layout.B()));
    for (int i = 0; i < layout.B(); ++i) {
        const bitvec e = bitvec::unit(i, layout.B());
        systematic_entry ent;
        ent.fragment = i;
        for (int l = 1; l <= layout.n() && ent.node_id == 0; ++l) {
            const auto& basis = layout.node_basis(l);
            for (std::size_t j = 0; j < basis.size(); ++j) {
                if (basis[j] == e) {
                    ent.node_id = l;
                    ent.piece_idxs = {static_cast<int>(j)};
                    break;
                }
            }
            if (ent.node_id == 0 && layout.node_covers(l, e)) {
                // spread partition: exactly one node covers e_i
                auto sol = solve_xor(std::vector<bitvec>{e}, basis);
                ent.node_id = l;
                ent.piece_idxs = *sol.front();
            }
        }
        out.push_back(std::move(ent));
    }
    return out;
}

// Reads pieces from live nodes; nullopt means the node is unavailable.
using piece_oracle = std::function<std::optional<piece>(int node_id, int piece_idx)>;

class node_unavailable_error : public error {
public:
    node_unavailable_error(std::vector<int> fragments, const std::string& what)
        : error(errc::node_unavailable, what), missing_fragments_(std::move(fragments)) {}

    const std::vector<int>& missing_fragments() const { return missing_fragments_; }

private:
    std::vector<int> missing_fragments_;
};

// Assembles the object from at most B piece reads, XORing within a node
// where a unit vector is not stored directly. No matrix inversion.
inline object_data retrieve_systematic(const spread_layout& layout, const piece_oracle& fetch) {
    const auto smap = systematic_map(layout);
    object_data obj;
    obj.fragments.resize(static_cast<std::size_t>(layout.B()));
    std::vector<int> missing;
    for (const auto& ent : smap) {
        std::vector<std::uint8_t> acc;
        bool ok = true;
        for (int idx : ent.piece_idxs) {
            auto pc = fetch(ent.node_id, idx);
            if (!pc) {
                ok = false;
                break;
            }
            if (acc.empty())
                acc = std::move(pc->payload);
            else
                xor_into(acc, pc->payload);
        }
        if (!ok) {
            missing.push_back(ent.fragment);
            continue;
        }
        obj.fragments[static_cast<std::size_t>(ent.fragment)] = std::move(acc);
    }
    if (!missing.empty()) {
        std::string what = "fragments unavailable:";
        for (int f : missing) what += " " + std::to_string(f + 1);
        throw node_unavailable_error(missing, what);
    }
    return obj;
}

}  // namespace psrc

#endif
