#ifndef PSRC_REPAIR_HPP
#define PSRC_REPAIR_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "psrc/codec.hpp"
#include "psrc/layout.hpp"

namespace psrc {

// Reconstruction instructions for one failed node. Downloaded pieces are
// flattened in source order; each recipe is a list of indices into that
// flat list whose coeff XOR equals the corresponding lost basis vector.
struct repair_plan {
    int failed_node = 0;
    std::vector<std::pair<int, std::vector<int>>> sources;  // (node id, piece indices)
    std::vector<std::vector<int>> recipes;                  // one per lost piece, in basis order
    int download_units = 0;
    bool optimal = true;  // false when the exact search budget was exceeded

    std::vector<std::pair<int, int>> downloads() const {
        std::vector<std::pair<int, int>> flat;
        for (const auto& [node, idxs] : sources)
            for (int i : idxs) flat.emplace_back(node, i);
        return flat;
    }
};

inline std::vector<int> all_live_except(const spread_layout& layout, int failed) {
    std::vector<int> live;
    for (int j = 1; j <= layout.n(); ++j)
        if (j != failed) live.push_back(j);
    return live;
}

namespace detail {

// span(node_i u node_j) covers node_l's subspace?
inline bool pair_covers(const spread_layout& layout, int l, int i, int j) {
    echelon e(layout.B());
    for (const auto& v : layout.node_basis(i)) e.add(v);
    for (const auto& v : layout.node_basis(j)) e.add(v);
    for (const auto& v : layout.node_basis(l))
        if (!e.contains(v)) return false;
    return true;
}

}  // namespace detail

// All nodes j (other than l and i) such that nodes i and j together can
// regenerate node l. Nonempty for every choice of live i.
inline std::vector<int> pair_partner(const spread_layout& layout, int failed, int first) {
    layout.check_node(failed);
    layout.check_node(first);
    if (failed == first)
        throw error(errc::invalid_node, "first contact equals failed node");
    std::vector<int> partners;
    for (int j = 1; j <= layout.n(); ++j) {
        if (j == failed || j == first) continue;
        if (detail::pair_covers(layout, failed, first, j)) partners.push_back(j);
    }
    return partners;
}

// Closed-form partners for alpha=2: with l' = failed-1 and i' = first-1
// as coset exponents, the three usable nodes come from
//   nu^(l') + nu^(i'),  nu^(l')*omega + nu^(i'),  nu^(l') + nu^(i')*omega,
// each mapped back to its coset index mod n.
inline std::array<int, 3> three_partners_alpha2(const spread_layout& layout, int failed,
                                                int first) {
    if (layout.alpha() != 2)
        throw error(errc::alpha_unsupported,
                    "closed form requires alpha=2, got " + std::to_string(layout.alpha()));
    layout.check_node(failed);
    layout.check_node(first);
    if (failed == first)
        throw error(errc::invalid_node, "first contact equals failed node");
    const gf2m& ctx = layout.ctx();
    const bitvec omega = subfield_generator(ctx, layout.alpha());
    const bitvec vl = ctx.pow_of_generator(failed - 1);
    const bitvec vi = ctx.pow_of_generator(first - 1);
    auto coset_node = [&](const bitvec& v) {
        return static_cast<int>(ctx.log(v) % static_cast<std::uint32_t>(layout.n())) + 1;
    };
    return {coset_node(vl ^ vi), coset_node(ctx.mul(vl, omega) ^ vi),
            coset_node(vl ^ ctx.mul(vi, omega))};
}

// Every unordered live pair {i,j} whose combined span covers node l.
inline std::vector<std::pair<int, int>> repair_pairs(const spread_layout& layout, int failed,
                                                     const std::vector<int>& live) {
    layout.check_node(failed);
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t a = 0; a < live.size(); ++a) {
        for (std::size_t b = a + 1; b < live.size(); ++b) {
            int i = live[a], j = live[b];
            if (i == failed || j == failed) continue;
            if (detail::pair_covers(layout, failed, i, j)) pairs.emplace_back(i, j);
        }
    }
    return pairs;
}

inline std::vector<std::pair<int, int>> repair_pairs(const spread_layout& layout, int failed) {
    return repair_pairs(layout, failed, all_live_except(layout, failed));
}

// d=2 repair: download all 2*alpha pieces of the pair and XOR per recipe.
inline repair_plan plan_pair_repair(const spread_layout& layout, int failed,
                                    std::pair<int, int> pair) {
    layout.check_node(failed);
    layout.check_node(pair.first);
    layout.check_node(pair.second);
    if (!detail::pair_covers(layout, failed, pair.first, pair.second))
        throw error(errc::pair_insufficient,
                    "nodes " + std::to_string(pair.first) + "," + std::to_string(pair.second) +
                        " cannot repair node " + std::to_string(failed));
    repair_plan plan;
    plan.failed_node = failed;
    std::vector<bitvec> pool;
    for (int node : {pair.first, pair.second}) {
        std::vector<int> idxs;
        for (int j = 0; j < layout.alpha(); ++j) idxs.push_back(j);
        plan.sources.emplace_back(node, std::move(idxs));
        for (const auto& v : layout.node_basis(node)) pool.push_back(v);
    }
    auto sols = solve_xor(layout.node_basis(failed), pool);
    for (auto& s : sols) plan.recipes.push_back(std::move(*s));
    plan.download_units = static_cast<int>(pool.size());
    return plan;
}

// Minimal-download plan with at most d source nodes: exact search over
// piece subsets in increasing size, capped at search_budget candidates;
// greedy fallback (optimal=false) beyond the cap.
inline repair_plan plan_min_download(const spread_layout& layout, int failed, int d,
                                     const std::vector<int>& live,
                                     std::uint64_t search_budget = std::uint64_t{1} << 18) {
    layout.check_node(failed);
    if (d < 2) throw error(errc::unsupported, "d must be >= 2");
    struct pool_entry {
        int node;
        int piece_idx;
        bitvec v;
    };
    std::vector<pool_entry> pool;
    for (int node : live) {
        if (node == failed) continue;
        layout.check_node(node);
        const auto& basis = layout.node_basis(node);
        for (std::size_t j = 0; j < basis.size(); ++j)
            pool.push_back({node, static_cast<int>(j), basis[j]});
    }
    const auto& lost = layout.node_basis(failed);

    auto feasible = [&](const std::vector<int>& subset) {
        std::set<int> nodes;
        echelon e(layout.B());
        for (int idx : subset) {
            nodes.insert(pool[static_cast<std::size_t>(idx)].node);
            e.add(pool[static_cast<std::size_t>(idx)].v);
        }
        if (static_cast<int>(nodes.size()) > d) return false;
        for (const auto& v : lost)
            if (!e.contains(v)) return false;
        return true;
    };

    auto make_plan = [&](const std::vector<int>& subset, bool optimal) {
        repair_plan plan;
        plan.failed_node = failed;
        plan.optimal = optimal;
        std::map<int, std::vector<int>> by_node;
        std::vector<bitvec> vecs;
        for (int idx : subset) {
            const auto& pe = pool[static_cast<std::size_t>(idx)];
            by_node[pe.node].push_back(pe.piece_idx);
            vecs.push_back(pe.v);
        }
        for (auto& [node, idxs] : by_node) plan.sources.emplace_back(node, idxs);
        // recipes index the flat download list, which follows sources order
        std::vector<bitvec> flat;
        for (const auto& [node, idxs] : plan.sources)
            for (int i : idxs) flat.push_back(layout.node_basis(node)[static_cast<std::size_t>(i)]);
        auto sols = solve_xor(lost, flat);
        for (auto& s : sols) {
            if (!s)
                throw error(errc::pair_insufficient, "internal: infeasible subset accepted");
            plan.recipes.push_back(std::move(*s));
        }
        plan.download_units = static_cast<int>(subset.size());
        return plan;
    };

    // size-s combinations, smallest size first
    const int np = static_cast<int>(pool.size());
    std::uint64_t candidates = 0;
    for (int s = layout.alpha(); s <= std::min(np, layout.alpha() * d); ++s) {
        std::vector<int> comb(static_cast<std::size_t>(s));
        for (int i = 0; i < s; ++i) comb[static_cast<std::size_t>(i)] = i;
        while (true) {
            if (++candidates > search_budget) goto greedy;
            if (feasible(comb)) return make_plan(comb, true);
            int i = s - 1;
            while (i >= 0 && comb[static_cast<std::size_t>(i)] == np - s + i) --i;
            if (i < 0) break;
            ++comb[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < s; ++j)
                comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
greedy:
    // Greedy fallback: grow the subset by the piece that most increases
    // coverage of the lost span, preferring already-used nodes.
    {
        std::vector<int> subset;
        std::set<int> nodes;
        echelon e(layout.B());
        std::vector<bool> used(static_cast<std::size_t>(np), false);
        while (true) {
            bool done = true;
            for (const auto& v : lost)
                if (!e.contains(v)) done = false;
            if (done) break;
            int best = -1;
            int best_gain = -1;
            for (int idx = 0; idx < np; ++idx) {
                if (used[static_cast<std::size_t>(idx)]) continue;
                const auto& pe = pool[static_cast<std::size_t>(idx)];
                const bool new_node = !nodes.count(pe.node);
                if (new_node && static_cast<int>(nodes.size()) >= d) continue;
                echelon trial = e;
                trial.add(pe.v);
                int gain = 0;
                for (const auto& v : lost)
                    if (!e.contains(v) && trial.contains(v)) ++gain;
                gain = gain * 4 + (trial.rank() - e.rank()) * 2 + (new_node ? 0 : 1);
                if (gain > best_gain) {
                    best_gain = gain;
                    best = idx;
                }
            }
            if (best < 0)
                throw error(errc::insufficient_live_nodes,
                            "no live piece subset with <= " + std::to_string(d) +
                                " nodes covers node " + std::to_string(failed));
            used[static_cast<std::size_t>(best)] = true;
            subset.push_back(best);
            nodes.insert(pool[static_cast<std::size_t>(best)].node);
            e.add(pool[static_cast<std::size_t>(best)].v);
        }
        if (!feasible(subset))
            throw error(errc::insufficient_live_nodes,
                        "greedy search failed for node " + std::to_string(failed));
        return make_plan(subset, false);
    }
}

inline repair_plan plan_min_download(const spread_layout& layout, int failed, int d) {
    return plan_min_download(layout, failed, d, all_live_except(layout, failed));
}

// Applies a plan to actual pieces: downloads per the source list and XORs
// payloads per recipe, producing the failed node's pieces.
inline node_pieces execute_plan(const spread_layout& layout, const repair_plan& plan,
                                const piece_oracle& fetch) {
    std::vector<piece> downloaded;
    for (const auto& [node, idxs] : plan.sources) {
        for (int i : idxs) {
            auto pc = fetch(node, i);
            if (!pc)
                throw error(errc::node_unavailable,
                            "source node " + std::to_string(node) + " unavailable");
            downloaded.push_back(std::move(*pc));
        }
    }
    const auto& lost = layout.node_basis(plan.failed_node);
    node_pieces restored;
    restored.node_id = plan.failed_node;
    for (std::size_t r = 0; r < plan.recipes.size(); ++r) {
        bitvec coeff = bitvec::zero(layout.B());
        std::vector<std::uint8_t> payload(downloaded.front().payload.size(), 0);
        for (int idx : plan.recipes[r]) {
            coeff ^= downloaded[static_cast<std::size_t>(idx)].coeff;
            xor_into(payload, downloaded[static_cast<std::size_t>(idx)].payload);
        }
        if (coeff != lost[r])
            throw error(errc::inconsistent_pieces,
                        "recipe does not reproduce lost basis vector " + lost[r].str());
        restored.pieces.push_back(piece{coeff, std::move(payload)});
    }
    return restored;
}

// Pair assignment for simultaneous repairs. Live nodes may serve several
// repairs; pairs are chosen greedily, least-loaded live nodes first.
struct assignment_result {
    bool feasible = true;
    int blocked_node = 0;  // set when infeasible
    std::vector<std::pair<int, std::pair<int, int>>> assignment;  // failed -> pair
    std::map<int, int> load;  // live node -> repairs served
};

inline assignment_result simultaneous_assignment(const spread_layout& layout,
                                                 const std::vector<int>& failed,
                                                 const std::vector<int>& live) {
    assignment_result res;
    for (int node : live) res.load[node] = 0;
    for (int f : failed) {
        auto pairs = repair_pairs(layout, f, live);
        if (pairs.empty()) {
            res.feasible = false;
            res.blocked_node = f;
            res.assignment.clear();
            return res;
        }
        auto cost = [&res](const std::pair<int, int>& pr) {
            int a = res.load[pr.first], b = res.load[pr.second];
            return std::pair<int, int>(std::max(a, b), a + b);
        };
        auto best = *std::min_element(pairs.begin(), pairs.end(),
                                      [&](const auto& x, const auto& y) {
                                          return cost(x) < cost(y);
                                      });
        res.assignment.emplace_back(f, best);
        ++res.load[best.first];
        ++res.load[best.second];
    }
    return res;
}

}  // namespace psrc

#endif
