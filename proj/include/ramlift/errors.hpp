#pragma once

#include <stdexcept>
#include <string>

namespace ramlift {

// Root of every error thrown by the library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mathematical precondition violated (bad argument, out-of-domain input).
struct domain_error : error {
    using error::error;
};

// Inversion of a matrix or residue whose determinant/value is not a unit.
struct singular_error : domain_error {
    using domain_error::domain_error;
};

// Invalid run configuration, model file, or (p, N) combination.
struct config_error : error {
    using error::error;
};

// A search was aborted before it could certify a negative result.
struct budget_error : error {
    using error::error;
};

} // namespace ramlift
