#ifndef PSRC_BITVEC_HPP
#define PSRC_BITVEC_HPP

#include <bit>
#include <cstdint>
#include <string>

#include "psrc/error.hpp"

namespace psrc {

// A GF(2) coordinate vector of fixed width (<= 24 in practice, 32 supported).
// Coordinate j is the coefficient of the basis element nu^j, so the field
// element 1 prints as "1000..." with coordinate 0 first.
class bitvec {
public:
    bitvec() = default;

    bitvec(std::uint32_t bits, int width) : bits_(bits), width_(width) {
        if (width <= 0 || width > 32)
            throw error(errc::unsupported, "bitvec width " + std::to_string(width));
        if (width < 32 && (bits >> width) != 0)
            throw error(errc::width_mismatch, "bits exceed width");
    }

    static bitvec zero(int width) { return bitvec(0, width); }

    static bitvec unit(int coord, int width) {
        return bitvec(std::uint32_t{1} << coord, width);
    }

    static bitvec parse(const std::string& s) {
        if (s.empty() || s.size() > 32)
            throw error(errc::parse_error, "bad bit string '" + s + "'");
        std::uint32_t bits = 0;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (s[j] == '1')
                bits |= std::uint32_t{1} << j;
            else if (s[j] != '0')
                throw error(errc::parse_error, "bad bit string '" + s + "'");
        }
        return bitvec(bits, static_cast<int>(s.size()));
    }

    std::uint32_t bits() const { return bits_; }
    int width() const { return width_; }
    bool is_zero() const { return bits_ == 0; }
    bool get(int coord) const { return (bits_ >> coord) & 1u; }
    int popcount() const { return std::popcount(bits_); }

    // Coordinate 0 first, matching the paper's tuple printing.
    std::string str() const {
        std::string s(static_cast<std::size_t>(width_), '0');
        for (int j = 0; j < width_; ++j)
            if (get(j)) s[static_cast<std::size_t>(j)] = '1';
        return s;
    }

    friend bitvec operator^(const bitvec& a, const bitvec& b) {
        if (a.width_ != b.width_)
            throw error(errc::width_mismatch,
                        std::to_string(a.width_) + " vs " + std::to_string(b.width_));
        return bitvec(a.bits_ ^ b.bits_, a.width_);
    }

    bitvec& operator^=(const bitvec& b) { return *this = *this ^ b; }

    friend bool operator==(const bitvec&, const bitvec&) = default;

private:
    std::uint32_t bits_ = 0;
    int width_ = 1;
};

inline bitvec gf_add(const bitvec& a, const bitvec& b) { return a ^ b; }

}  // namespace psrc

#endif
