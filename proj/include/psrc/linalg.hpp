#ifndef PSRC_LINALG_HPP
#define PSRC_LINALG_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "psrc/bitvec.hpp"
#include "psrc/error.hpp"

namespace psrc {

// Incremental GF(2) row-echelon state. rows_[j], when nonzero, is the
// unique basis row whose lowest set bit is j.
class echelon {
public:
    explicit echelon(int width) : width_(width), rows_(static_cast<std::size_t>(width), 0) {}

    int rank() const { return rank_; }
    int width() const { return width_; }

    // Returns true if the vector was independent of the current span.
    bool add(std::uint32_t v) {
        v = reduce(v);
        if (v == 0) return false;
        rows_[static_cast<std::size_t>(std::countr_zero(v))] = v;
        ++rank_;
        return true;
    }

    bool add(const bitvec& v) {
        if (v.width() != width_)
            throw error(errc::width_mismatch, "echelon width mismatch");
        return add(v.bits());
    }

    bool contains(std::uint32_t v) const { return reduce(v) == 0; }
    bool contains(const bitvec& v) const { return reduce(v.bits()) == 0; }

private:
    std::uint32_t reduce(std::uint32_t v) const {
        while (v != 0) {
            std::uint32_t r = rows_[static_cast<std::size_t>(std::countr_zero(v))];
            if (r == 0) break;
            v ^= r;
        }
        return v;
    }

    int width_;
    int rank_ = 0;
    std::vector<std::uint32_t> rows_;
};

// GF(2) rank of a list of equal-width vectors. Empty input has rank 0.
inline int rank(std::span<const bitvec> rows) {
    if (rows.empty()) return 0;
    echelon e(rows.front().width());
    for (const auto& r : rows) e.add(r);
    return e.rank();
}

inline int rank(const std::vector<bitvec>& rows) {
    return rank(std::span<const bitvec>(rows));
}

namespace detail {

// Lex comparison of equal-popcount index masks: the set holding the
// lowest differing index sorts first.
inline bool mask_less(std::uint64_t a, std::uint64_t b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    if (a == b) return false;
    std::uint64_t d = a ^ b;
    return (a >> std::countr_zero(d)) & 1u;
}

}  // namespace detail

// For each target, a subset of pool indices whose XOR equals the target,
// or nullopt when the target is outside the pool's span. Deterministic:
// smallest subset, ties broken by lexicographically smallest index set.
// Pool size is capped at 64 indices.
inline std::vector<std::optional<std::vector<int>>> solve_xor(
    std::span<const bitvec> targets, std::span<const bitvec> pool) {
    std::vector<std::optional<std::vector<int>>> out;
    out.reserve(targets.size());
    if (targets.empty()) return out;
    if (pool.size() > 64)
        throw error(errc::unsupported, "solve_xor pool larger than 64");
    const int width = targets.front().width();
    for (const auto& p : pool)
        if (p.width() != width) throw error(errc::width_mismatch, "solve_xor pool width");

    const int np = static_cast<int>(pool.size());
    // Eliminate on (vector, index-mask) pairs; the mask tracks which pool
    // entries XOR to the vector. Lowest-index pivot preference comes from
    // processing pool entries in order.
    struct row {
        std::uint32_t v;
        std::uint64_t mask;
    };
    std::vector<row> basis(static_cast<std::size_t>(width), row{0, 0});
    std::vector<std::uint64_t> null_masks;
    for (int idx = 0; idx < np; ++idx) {
        std::uint32_t v = pool[static_cast<std::size_t>(idx)].bits();
        std::uint64_t mask = std::uint64_t{1} << idx;
        while (v != 0) {
            auto& r = basis[static_cast<std::size_t>(std::countr_zero(v))];
            if (r.v == 0) {
                r = row{v, mask};
                v = 0;
                mask = 0;
            } else {
                v ^= r.v;
                mask ^= r.mask;
            }
        }
        if (mask != 0) null_masks.push_back(mask);  // dependent entry
    }

    for (const auto& t : targets) {
        if (t.width() != width) throw error(errc::width_mismatch, "solve_xor target width");
        std::uint32_t v = t.bits();
        std::uint64_t mask = 0;
        while (v != 0) {
            const auto& r = basis[static_cast<std::size_t>(std::countr_zero(v))];
            if (r.v == 0) break;
            v ^= r.v;
            mask ^= r.mask;
        }
        if (v != 0) {
            out.emplace_back(std::nullopt);
            continue;
        }
        // Minimize over the nullspace coset when small enough to enumerate.
        std::uint64_t best = mask;
        if (null_masks.size() <= 20) {
            const std::uint64_t combos = std::uint64_t{1} << null_masks.size();
            for (std::uint64_t c = 1; c < combos; ++c) {
                std::uint64_t cand = mask;
                for (std::size_t j = 0; j < null_masks.size(); ++j)
                    if ((c >> j) & 1u) cand ^= null_masks[j];
                if (detail::mask_less(cand, best)) best = cand;
            }
        }
        std::vector<int> subset;
        for (int idx = 0; idx < np; ++idx)
            if ((best >> idx) & 1u) subset.push_back(idx);
        out.emplace_back(std::move(subset));
    }
    return out;
}

inline std::vector<std::optional<std::vector<int>>> solve_xor(
    const std::vector<bitvec>& targets, const std::vector<bitvec>& pool) {
    return solve_xor(std::span<const bitvec>(targets), std::span<const bitvec>(pool));
}

}  // namespace psrc

#endif
