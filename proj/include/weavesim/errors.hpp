#pragma once

#include <stdexcept>
#include <string>

namespace weave {

/// Bad numeric input (non-finite, out of domain).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Contract misuse: unknown id, non-adjacent lane, length mismatch.
class StructuralError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed or version-mismatched file content.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Simulation invariant breach (overlap after stepping). Signals a
/// safety-layer bug, not a recoverable condition.
class WorldFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite loss or gradient during an update.
class TrainingFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration key or value.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace weave
