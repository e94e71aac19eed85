#ifndef PSRC_PIECE_IO_HPP
#define PSRC_PIECE_IO_HPP

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "psrc/codec.hpp"

namespace psrc {

// Plain checksum (FNV-1a 64) for mismatch detection, not integrity crypto.
inline std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

struct piece_file {
    piece pc;
    std::size_t object_size = 0;  // true byte length before padding
    std::uint64_t digest = 0;     // checksum of the original object bytes
};

// Header line `piece v=<bits> len=<L> size=<bytes> object=<hex>` followed
// by exactly L raw payload bytes.
inline void write_piece(std::ostream& os, const piece_file& pf) {
    os << "piece v=" << pf.pc.coeff.str() << " len=" << pf.pc.payload.size()
       << " size=" << pf.object_size << " object=" << hex64(pf.digest) << "\n";
    os.write(reinterpret_cast<const char*>(pf.pc.payload.data()),
             static_cast<std::streamsize>(pf.pc.payload.size()));
}

inline piece_file read_piece(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw error(errc::parse_error, "missing piece header");
    std::istringstream hs(line);
    std::string tag;
    hs >> tag;
    if (tag != "piece") throw error(errc::parse_error, "bad piece header: " + line);
    piece_file pf;
    std::size_t len = 0;
    bool have_v = false, have_len = false;
    std::string kv;
    while (hs >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw error(errc::parse_error, "bad piece header field: " + kv);
        const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "v") {
            pf.pc.coeff = bitvec::parse(val);
            have_v = true;
        } else if (key == "len") {
            len = std::stoul(val);
            have_len = true;
        } else if (key == "size") {
            pf.object_size = std::stoul(val);
        } else if (key == "object") {
            pf.digest = std::stoull(val, nullptr, 16);
        }
    }
    if (!have_v || !have_len)
        throw error(errc::parse_error, "piece header missing v= or len=");
    pf.pc.payload.resize(len);
    is.read(reinterpret_cast<char*>(pf.pc.payload.data()), static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(is.gcount()) != len)
        throw error(errc::io_error, "truncated piece payload");
    return pf;
}

}  // namespace psrc

#endif
