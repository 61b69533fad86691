// errors.hpp: exception hierarchy shared by every module

#pragma once

#include <stdexcept>
#include <string>

namespace davies {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operand shapes do not line up (mismatched qubit counts, N vs 2^n, ...).
struct DimensionError : Error {
    using Error::Error;
};

// Input is well-shaped but invalid (non-finite coefficient, n < 2 for a ring, ...).
struct ValidationError : Error {
    using Error::Error;
};

// A caller-side mathematical precondition failed, e.g. f is not in V_omega.
struct PreconditionError : Error {
    using Error::Error;
};

// Eigensolver failure or a residual check beyond tolerance.
struct NumericalError : Error {
    using Error::Error;
};

struct UnknownFrequencyError : Error {
    using Error::Error;
};

// The generator matrix on some V_omega is not Hermitian: the rate function
// breaks detailed balance or the jump set is not self-adjoint.
struct ReversibilityError : Error {
    using Error::Error;
};

struct UnsupportedError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// A Cheeger witness projection with (numerically) zero variance.
struct DegenerateWitnessError : Error {
    using Error::Error;
};

} // namespace davies
