#pragma once

#include <stdexcept>
#include <string>

namespace wfgame {

// Thrown when inputs violate a documented precondition (bad sizes, malformed
// configs, out-of-range parameters). The CLI maps this to exit code 2.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a computation fails at runtime (solver stagnation, exhausted
// rejection budget). The CLI maps this to exit code 3.
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace wfgame
