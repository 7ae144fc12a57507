#pragma once

#include <stdexcept>
#include <string>

namespace symreg {

// Error taxonomy used across the library. The CLI maps these onto its
// stable exit codes (2 config/usage, 3 numeric, 4 format/IO).

struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct StateError : std::runtime_error {
    explicit StateError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace symreg
