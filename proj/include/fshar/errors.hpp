#pragma once

#include <stdexcept>
#include <string>

namespace fshar {

// Base type for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad sizes, shapes, or option values supplied by the caller.
struct InvalidConfigError : Error {
    using Error::Error;
};

// Structurally valid input with unusable content (empty batch, bad label, ...).
struct InvalidInputError : Error {
    using Error::Error;
};

// Non-finite values where finite numerics are required.
struct NumericInputError : Error {
    using Error::Error;
};

// An embedding row with zero norm cannot be cosine-normalized.
struct DegenerateEmbeddingError : Error {
    using Error::Error;
};

// A class does not have enough samples for the requested selection.
struct InsufficientSamplesError : Error {
    using Error::Error;
};

// Malformed text input; message carries the offending line number.
struct ParseError : Error {
    using Error::Error;
};

// A term is missing from the hit-count table.
struct UnknownTermError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace fshar
