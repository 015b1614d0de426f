#ifndef QARLAB_ERRORS_HPP
#define QARLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qarlab {

// Invalid argument values (out-of-range inputs, bad parameters).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Numerical failure during an otherwise valid computation (degenerate
// derivative, factorization failure, bracket failure). Samplers treat
// these as rejected evaluations rather than aborting.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File/format problems: unreadable paths, malformed CSV, bad config.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qarlab

#endif
