#ifndef PSRC_LAYOUT_HPP
#define PSRC_LAYOUT_HPP

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "psrc/gf.hpp"
#include "psrc/linalg.hpp"

namespace psrc {

// PSRC(n,k) parameterization derived from (B, alpha).
struct code_params {
    int B = 0;      // object dimension, fragments per object
    int alpha = 0;  // pieces per node (t+1)
    int b = 0;      // B / alpha
    int n = 0;      // node count (2^B - 1) / (2^alpha - 1)
    int k = 0;      // retrieval threshold B / alpha
    std::uint32_t poly = 0;

    friend bool operator==(const code_params&, const code_params&) = default;
};

inline code_params derive_params(int B, int alpha, std::uint32_t poly = 0) {
    if (alpha < 1) throw error(errc::divisibility_violation, "alpha must be >= 1");
    if (B < 2 || B > 24)
        throw error(errc::unsupported, "B out of range [2,24]: " + std::to_string(B));
    if (B % alpha != 0)
        throw error(errc::divisibility_violation,
                    std::to_string(alpha) + " does not divide B=" + std::to_string(B));
    code_params p;
    p.B = B;
    p.alpha = alpha;
    p.b = B / alpha;
    p.k = B / alpha;
    p.n = static_cast<int>(((std::uint32_t{1} << B) - 1) / ((std::uint32_t{1} << alpha) - 1));
    p.poly = poly ? poly : default_poly(B);
    return p;
}

// omega = nu^((2^m-1)/(2^alpha-1)), the generator of the subfield F_{2^alpha}^*.
inline bitvec subfield_generator(const gf2m& ctx, int alpha) {
    if (ctx.m() % alpha != 0)
        throw error(errc::divisibility_violation,
                    std::to_string(alpha) + " does not divide m=" + std::to_string(ctx.m()));
    const std::uint32_t e = ctx.order() / ((std::uint32_t{1} << alpha) - 1);
    return ctx.pow_of_generator(e);
}

// Canonical per-node bases: node l (1-indexed) holds {nu^(l-1) * omega^j}.
// The spans are the cosets nu^(l-1) F_{2^alpha}^* plus 0, which partition
// the nonzero points of the space.
class spread_layout {
public:
    explicit spread_layout(const code_params& params)
        : params_(params), ctx_(params.B, params.poly) {
        const bitvec omega = subfield_generator(ctx_, params_.alpha);
        node_bases_.reserve(static_cast<std::size_t>(params_.n));
        for (int l = 0; l < params_.n; ++l) {
            std::vector<bitvec> basis;
            basis.reserve(static_cast<std::size_t>(params_.alpha));
            bitvec v = ctx_.pow_of_generator(l);
            for (int j = 0; j < params_.alpha; ++j) {
                basis.push_back(v);
                v = ctx_.mul(v, omega);
            }
            node_bases_.push_back(std::move(basis));
        }
    }

    // Unchecked: takes the given bases verbatim (verify_spread reports
    // whether they actually form a spread).
    spread_layout(const code_params& params, std::vector<std::vector<bitvec>> bases)
        : params_(params), ctx_(params.B, params.poly), node_bases_(std::move(bases)) {
        if (static_cast<int>(node_bases_.size()) != params_.n)
            throw error(errc::dimension_mismatch, "expected n node bases");
    }

    const code_params& params() const { return params_; }
    const gf2m& ctx() const { return ctx_; }
    int n() const { return params_.n; }
    int B() const { return params_.B; }
    int alpha() const { return params_.alpha; }
    int k() const { return params_.k; }

    // node_id is 1-based, matching the paper's N_1..N_n.
    const std::vector<bitvec>& node_basis(int node_id) const {
        check_node(node_id);
        return node_bases_[static_cast<std::size_t>(node_id - 1)];
    }

    const std::vector<std::vector<bitvec>>& node_bases() const { return node_bases_; }

    void check_node(int node_id) const {
        if (node_id < 1 || node_id > params_.n)
            throw error(errc::invalid_node, "node id " + std::to_string(node_id) +
                                                " outside 1.." + std::to_string(params_.n));
    }

    // True if v lies in node_id's subspace.
    bool node_covers(int node_id, const bitvec& v) const {
        echelon e(params_.B);
        for (const auto& w : node_basis(node_id)) e.add(w);
        return e.contains(v);
    }

private:
    code_params params_;
    gf2m ctx_;
    std::vector<std::vector<bitvec>> node_bases_;
};

inline spread_layout build_layout(const code_params& params) {
    return spread_layout(params);
}

inline spread_layout build_layout(int B, int alpha) {
    return spread_layout(derive_params(B, alpha));
}

struct verify_report {
    bool ok = true;
    std::vector<std::string> violations;
};

// Diagnostic check of the spread property: per-node rank alpha, every
// nonzero point covered exactly once, spans equal to the cosets.
inline verify_report verify_spread(const spread_layout& layout) {
    verify_report rep;
    auto fail = [&rep](std::string msg) {
        rep.ok = false;
        rep.violations.push_back(std::move(msg));
    };
    const auto& p = layout.params();
    const std::uint32_t total = (std::uint32_t{1} << p.B) - 1;
    std::vector<int> cover(total + 1, 0);
    for (int l = 1; l <= p.n; ++l) {
        const auto& basis = layout.node_basis(l);
        if (static_cast<int>(basis.size()) != p.alpha)
            fail("node N" + std::to_string(l) + " has " + std::to_string(basis.size()) +
                 " vectors, expected alpha=" + std::to_string(p.alpha));
        if (rank(basis) < static_cast<int>(basis.size()))
            fail("node rank < alpha at N" + std::to_string(l));
        // enumerate the node's span points
        const std::uint32_t span_sz = std::uint32_t{1} << basis.size();
        for (std::uint32_t mask = 1; mask < span_sz; ++mask) {
            std::uint32_t v = 0;
            for (std::size_t j = 0; j < basis.size(); ++j)
                if ((mask >> j) & 1u) v ^= basis[j].bits();
            if (v == 0) continue;  // already reported as rank deficiency
            if (++cover[v] == 2)
                fail("point covered twice: " + bitvec(v, p.B).str());
        }
    }
    std::uint32_t covered = 0;
    for (std::uint32_t v = 1; v <= total; ++v)
        if (cover[v] > 0) ++covered;
    if (covered != total)
        fail("only " + std::to_string(covered) + " of " + std::to_string(total) +
             " nonzero points covered");
    return rep;
}

inline void write_layout(std::ostream& os, const spread_layout& layout) {
    const auto& p = layout.params();
    os << "psrc B=" << p.B << " alpha=" << p.alpha << " n=" << p.n << " poly=" << std::hex
       << p.poly << std::dec << "\n";
    for (int l = 1; l <= p.n; ++l) {
        os << "N" << l << ":";
        for (const auto& v : layout.node_basis(l)) os << " " << v.str();
        os << "\n";
    }
}

// Parses a layout file. Vectors are taken as stored; run verify_spread
// on the result to validate them.
inline spread_layout read_layout(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw error(errc::parse_error, "empty layout file");
    int B = 0, alpha = 0, n = 0;
    std::uint32_t poly = 0;
    {
        std::istringstream hs(line);
        std::string tag, kv;
        hs >> tag;
        if (tag != "psrc") throw error(errc::parse_error, "bad layout header: " + line);
        while (hs >> kv) {
            auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw error(errc::parse_error, "bad layout header field: " + kv);
            std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
            if (key == "B") B = std::stoi(val);
            else if (key == "alpha") alpha = std::stoi(val);
            else if (key == "n") n = std::stoi(val);
            else if (key == "poly") poly = static_cast<std::uint32_t>(std::stoul(val, nullptr, 16));
        }
    }
    code_params params = derive_params(B, alpha, poly);
    if (params.n != n)
        throw error(errc::parse_error, "layout header n=" + std::to_string(n) +
                                           " inconsistent with B,alpha");
    std::vector<std::vector<bitvec>> bases;
    int l = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        ++l;
        std::istringstream ls(line);
        std::string name;
        ls >> name;
        if (name != "N" + std::to_string(l) + ":")
            throw error(errc::parse_error, "expected node N" + std::to_string(l) +
                                               ", got: " + line);
        std::string bits;
        std::vector<bitvec> vecs;
        while (ls >> bits) vecs.push_back(bitvec::parse(bits));
        bases.push_back(std::move(vecs));
    }
    if (l != n)
        throw error(errc::parse_error, "layout file has " + std::to_string(l) + " of " +
                                           std::to_string(n) + " nodes");
    return spread_layout(params, std::move(bases));
}

}  // namespace psrc

#endif
