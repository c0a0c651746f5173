#pragma once

#include <stdexcept>
#include <string>

namespace fbtumor {

// Iterative procedure failed to reach its tolerance (series, quadrature,
// fixed point, time stepper).  The CLI maps this to exit code 3.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// A mathematical invariant that the model guarantees was violated at run
// time (e.g. a bracket that must be positive came out negative).  Exit code 4.
class InvariantViolation : public std::logic_error {
public:
    explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

// Bad run configuration (unknown key, malformed value, empty range).  Exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fbtumor
