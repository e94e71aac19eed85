#ifndef PSRC_GF_HPP
#define PSRC_GF_HPP

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "psrc/bitvec.hpp"
#include "psrc/error.hpp"

namespace psrc {

// Bundled primitive polynomials, one per extension degree m.
// m=4 and m=6 are pinned by the printed vectors they must reproduce
// (nu^4 = nu+1 and nu^21 = 110111 respectively); the rest are the
// conventional choices from standard tables.
inline std::uint32_t bundled_poly(int m) {
    static const std::uint32_t table[] = {
        0,         0,         0x7,       0xB,        0x13,      0x25,
        0x43,      0x89,      0x11D,     0x211,      0x409,     0x805,
        0x1053,    0x201B,    0x4443,    0x8003,     0x1100B,   0x20009,
        0x40081,   0x80027,   0x100009,  0x200005,   0x400003,  0x800021,
        0x1000087,
    };
    if (m < 2 || m > 24)
        throw error(errc::unsupported, "no bundled polynomial for m=" + std::to_string(m));
    return table[m];
}

// Polynomial for degree m, honoring the SPREADCODE_POLY_TABLE override
// file (`m hexpoly` per line) when set.
inline std::uint32_t default_poly(int m) {
    if (const char* path = std::getenv("SPREADCODE_POLY_TABLE")) {
        std::ifstream in(path);
        if (!in)
            throw error(errc::io_error, std::string("cannot open poly table ") + path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            int deg = 0;
            std::string hex;
            if (!(ls >> deg >> hex)) continue;
            if (deg == m) return static_cast<std::uint32_t>(std::stoul(hex, nullptr, 16));
        }
        // fall through to the bundled table for degrees the file omits
    }
    return bundled_poly(m);
}

// GF(2^m) with exp/log tables under a fixed primitive polynomial.
// Immutable after construction; all operations are pure.
class gf2m {
public:
    gf2m(int m, std::uint32_t poly) : m_(m), poly_(poly) {
        if (m < 2 || m > 24)
            throw error(errc::unsupported, "m out of range [2,24]: " + std::to_string(m));
        if (std::bit_width(poly) != m + 1)
            throw error(errc::degree_mismatch,
                        "polynomial degree != m=" + std::to_string(m));
        order_ = (std::uint32_t{1} << m) - 1;
        exp_.assign(order_, 0);
        log_.assign(std::size_t{1} << m, 0);
        std::uint32_t v = 1;  // nu^0
        for (std::uint32_t i = 0; i < order_; ++i) {
            if (v == 1 && i != 0)
                throw error(errc::not_primitive,
                            "order of x is " + std::to_string(i) + " < " +
                                std::to_string(order_));
            exp_[i] = v;
            log_[v] = i;
            v <<= 1;  // multiply by x
            if (v >> m) v ^= poly;
        }
        if (v != 1)
            throw error(errc::not_primitive, "x^(2^m-1) != 1, polynomial not primitive");
    }

    explicit gf2m(int m) : gf2m(m, default_poly(m)) {}

    int m() const { return m_; }
    std::uint32_t poly() const { return poly_; }
    std::uint32_t order() const { return order_; }  // |F^*| = 2^m - 1

    bitvec element(std::uint32_t bits) const { return bitvec(bits, m_); }
    bitvec one() const { return element(1); }
    bitvec generator() const { return element(exp_[1]); }  // nu = x

    // nu^e, exponent taken mod 2^m - 1 (negative allowed).
    bitvec pow_of_generator(long long e) const {
        long long r = e % order_;
        if (r < 0) r += order_;
        return element(exp_[static_cast<std::uint32_t>(r)]);
    }

    bitvec mul(const bitvec& a, const bitvec& b) const {
        check_width(a);
        check_width(b);
        if (a.is_zero() || b.is_zero()) return element(0);
        std::uint32_t s = log_[a.bits()] + log_[b.bits()];
        if (s >= order_) s -= order_;
        return element(exp_[s]);
    }

    bitvec pow(const bitvec& a, long long e) const {
        check_width(a);
        if (a.is_zero()) {
            if (e == 0) return one();
            if (e < 0) throw error(errc::log_of_zero, "0 has no inverse");
            return element(0);
        }
        long long r = (static_cast<long long>(log_[a.bits()]) * (e % order_)) % order_;
        if (r < 0) r += order_;
        return element(exp_[static_cast<std::uint32_t>(r)]);
    }

    std::uint32_t log(const bitvec& a) const {
        check_width(a);
        if (a.is_zero()) throw error(errc::log_of_zero, "log(0) undefined");
        return log_[a.bits()];
    }

    bitvec inverse(const bitvec& a) const { return pow(a, -1); }

private:
    void check_width(const bitvec& a) const {
        if (a.width() != m_)
            throw error(errc::width_mismatch,
                        "element width " + std::to_string(a.width()) + " != m=" +
                            std::to_string(m_));
    }

    int m_;
    std::uint32_t poly_;
    std::uint32_t order_;
    std::vector<std::uint32_t> exp_;
    std::vector<std::uint32_t> log_;
};

}  // namespace psrc

#endif
