#pragma once

#include <stdexcept>
#include <string>

namespace petermann {

// Bad user input: malformed config documents, out-of-range parameters,
// profiles that cannot describe a physical reservoir.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// The numerics refused: eigensolver non-convergence, self-orthogonal quasi
// modes, threshold tuning that does not settle, step-size violations.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace petermann
