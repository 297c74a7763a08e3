#pragma once

#include <stdexcept>
#include <string>

namespace supertomo {

/// Raised for violated preconditions (dimension mismatches, invalid parameters,
/// malformed files). Carries a human-readable message naming the offending values.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by the harness for invalid or inconsistent experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace supertomo
