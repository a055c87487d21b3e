#pragma once

#include <stdexcept>
#include <string>

namespace playlab {

// Bad values in a config or preset (CLI maps this to exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed runtime inputs (shape mismatches, missing channels, ...).
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operation called on an object in the wrong state (tape reuse, empty scene).
struct StateError : std::runtime_error {
    explicit StateError(const std::string& msg) : std::runtime_error(msg) {}
};

// Retryable: the producer has not generated enough data yet.
struct NotReadyError : std::runtime_error {
    explicit NotReadyError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace playlab
