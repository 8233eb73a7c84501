#pragma once

#include <stdexcept>
#include <string>

namespace dce {

// Error taxonomy shared by the library and the CLI. The CLI maps these to
// process exit codes (config -> 2, io -> 3, numeric -> 4).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct IndexError : Error {
    using Error::Error;
};

struct VocabError : Error {
    using Error::Error;
};

struct EmptyInputError : Error {
    using Error::Error;
};

struct LengthError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct AlignmentError : Error {
    using Error::Error;
};

struct DegenerateError : Error {
    using Error::Error;
};

struct InsufficientHistoryError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace dce
