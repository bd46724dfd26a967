#pragma once

#include <stdexcept>
#include <string>

namespace modal_stream {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
    using Error::Error;
};

// ----- dynamics -----

struct SingularMassError : Error {
    using Error::Error;
};

struct SingularFitError : Error {
    using Error::Error;
};

struct DivergenceError : Error {
    using Error::Error;
};

struct DegenerateModeError : Error {
    using Error::Error;
};

// ----- signal / streaming -----

struct TooShortError : Error {
    using Error::Error;
};

struct StreamCorruptionError : Error {
    using Error::Error;
};

// ----- eigenspace / whitening -----

struct DegenerateInitError : Error {
    using Error::Error;
};

struct RejectedSampleError : Error {
    using Error::Error;
};

struct IllConditionedError : Error {
    IllConditionedError(const std::string& what, int index)
        : Error(what), offending_index(index) {}
    int offending_index;  // eigenvalue / column that tripped the guard
};

struct RankDeficiencyError : Error {
    using Error::Error;
};

struct InvalidStackError : Error {
    using Error::Error;
};

}  // namespace modal_stream
