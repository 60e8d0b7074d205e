#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iil {

// Shape disagreement between tensors, layers or batches.
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// An operation was called in an invalid order (e.g. backward without forward).
struct StateError : std::runtime_error {
    explicit StateError(const std::string& what) : std::runtime_error(what) {}
};

// Numerically invalid input (NaN logits, non-positive sigma, ...).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed binary file; carries the byte offset of the first bad record.
struct FormatError : std::runtime_error {
    FormatError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (offset " + std::to_string(offset) + ")"),
          offset(offset) {}
    std::size_t offset;
};

// Bad or missing configuration key/value.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Training diverged (NaN loss); carries the last diagnostics string.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem-level failure.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace iil
