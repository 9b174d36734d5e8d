#pragma once

#include <stdexcept>
#include <string>

namespace evifuse {

// Argument outside the mathematical domain of an operation (negative
// evidence, alpha < 1, off-simplex point, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Vector lengths disagree or are too short.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Invalid user configuration (CLI, JSON config, generator/trainer settings).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace evifuse
