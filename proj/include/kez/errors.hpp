#pragma once

#include <stdexcept>
#include <string>

namespace kez {

// Every failure the library reports derives from Error. The CLI maps the
// concrete type onto its exit-code contract (see cli_runner.hpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: malformed config, violated precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

// The requested integral is infinite (weight condition / threshold violated).
class StabilityError : public Error {
public:
    using Error::Error;
};

// Iterative solver failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Argument sits exactly on a pole of Gamma.
class PoleError : public Error {
public:
    using Error::Error;
};

// Two points (or a point and a marked point) coincide.
class CoincidenceError : public Error {
public:
    using Error::Error;
};

// A structurally valid request the algorithm cannot answer.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// A numeric estimate disagrees with its oracle.
class OracleMismatchError : public Error {
public:
    using Error::Error;
};

}  // namespace kez
