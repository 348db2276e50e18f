#ifndef CHEEGERKIT_ERRORS_HPP
#define CHEEGERKIT_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace cheegerkit {

enum class ErrorKind {
    // input validation
    unsupported_domain,
    unsupported_dimension,
    invalid_graph,
    invalid_cross_section,
    resolution,
    dilation_not_closed,
    empty_set,
    empty_domain,
    size,
    sign,
    ill_posed,
    mesh_quality,
    hypothesis_violated,
    parse,
    // numerical failures
    non_convergence,
    linear_solve,
    witness_search_failure,
};

inline constexpr std::string_view to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::unsupported_domain: return "unsupported-domain";
    case ErrorKind::unsupported_dimension: return "unsupported-dimension";
    case ErrorKind::invalid_graph: return "invalid-graph";
    case ErrorKind::invalid_cross_section: return "invalid-cross-section";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::dilation_not_closed: return "dilation-not-closed";
    case ErrorKind::empty_set: return "empty-set";
    case ErrorKind::empty_domain: return "empty-domain";
    case ErrorKind::size: return "size";
    case ErrorKind::sign: return "sign";
    case ErrorKind::ill_posed: return "ill-posed";
    case ErrorKind::mesh_quality: return "mesh-quality";
    case ErrorKind::hypothesis_violated: return "hypothesis-violated";
    case ErrorKind::parse: return "parse";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::linear_solve: return "linear-solve";
    case ErrorKind::witness_search_failure: return "witness-search-failure";
    }
    return "unknown";
}

/// True for failures of a numerical procedure on valid input (CLI exit code 3);
/// everything else is a validation failure (exit code 2).
inline constexpr bool is_solver_failure(ErrorKind k) {
    return k == ErrorKind::non_convergence || k == ErrorKind::linear_solve ||
           k == ErrorKind::witness_search_failure;
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string &what) {
    if (!cond) fail(kind, what);
}

} // namespace cheegerkit

#endif
