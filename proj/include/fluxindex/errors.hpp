#ifndef FLUXINDEX_ERRORS_HPP
#define FLUXINDEX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fluxindex {

// Invalid run configuration (bad schema, unknown keys, inconsistent values).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The Fermi level touches the spectrum, so projections and indices are
// undefined for the requested input.
struct GapClosedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fluxindex

#endif
