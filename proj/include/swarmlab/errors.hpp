#pragma once

#include <stdexcept>

namespace swarmlab {

/// File and format problems: missing inputs, malformed or mismatched data.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Algorithmic failures: solver non-convergence, impossible generation constraints.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace swarmlab
