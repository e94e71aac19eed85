#ifndef PSRC_ERROR_HPP
#define PSRC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace psrc {

enum class errc {
    not_primitive,
    degree_mismatch,
    width_mismatch,
    log_of_zero,
    divisibility_violation,
    invalid_node,
    alpha_unsupported,
    pair_insufficient,
    insufficient_live_nodes,
    fragment_length_mismatch,
    dimension_mismatch,
    inconsistent_pieces,
    node_unavailable,
    budget_exceeded,
    parse_error,
    io_error,
    unsupported,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::not_primitive: return "NotPrimitive";
        case errc::degree_mismatch: return "DegreeMismatch";
        case errc::width_mismatch: return "WidthMismatch";
        case errc::log_of_zero: return "LogOfZero";
        case errc::divisibility_violation: return "DivisibilityViolation";
        case errc::invalid_node: return "InvalidNode";
        case errc::alpha_unsupported: return "AlphaUnsupported";
        case errc::pair_insufficient: return "PairInsufficient";
        case errc::insufficient_live_nodes: return "InsufficientLiveNodes";
        case errc::fragment_length_mismatch: return "FragmentLengthMismatch";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::inconsistent_pieces: return "InconsistentPieces";
        case errc::node_unavailable: return "NodeUnavailable";
        case errc::budget_exceeded: return "BudgetExceeded";
        case errc::parse_error: return "ParseError";
        case errc::io_error: return "IoError";
        case errc::unsupported: return "Unsupported";
    }
    return "Unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

}  // namespace psrc

#endif
