#pragma once

#include <stdexcept>
#include <string>

namespace qpmix {

/// Bad argument shape or value (size mismatch, bad qubit index, non-unit vector).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Request exceeds a documented size limit (qubit count, enumeration size).
struct CapacityError : std::length_error {
    using std::length_error::length_error;
};

/// A closed-form decomposition hit a vanishing denominator.
struct DegenerateDecompositionError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Input lies outside the small-angle regime a formula is valid for.
struct OutOfRegimeError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Operation is well defined but intentionally not supported (e.g. multi-qubit twirls).
struct UnsupportedError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Circuit could not be lowered to the Clifford+Rz form.
struct CompileError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Invalid experiment configuration; the message names the offending field path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qpmix
