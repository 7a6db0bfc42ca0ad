#pragma once

#include <stdexcept>
#include <string>

namespace pointprob {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad input file or document shape (missing/mistyped fields).
struct ParseError : Error {
    using Error::Error;
};

// Structurally well-formed input whose values violate an invariant
// (probability out of range, weights not normalized, count < 1, ...).
struct ValidationError : Error {
    using Error::Error;
};

// Evaluation requested outside the interior of the moment generating
// function's domain.
struct DomainError : Error {
    using Error::Error;
};

// The model is almost surely constant (zero variance), so standardized
// quantities are undefined.
struct DegenerateModel : Error {
    using Error::Error;
};

// Target point lies outside the open interval of attainable means.
struct OutOfRange : Error {
    using Error::Error;
};

// A requested essential bound is infinite.
struct UnboundedSide : Error {
    using Error::Error;
};

// Work or memory estimate exceeds the configured cap.
struct ResourceLimit : Error {
    using Error::Error;
};

}  // namespace pointprob
