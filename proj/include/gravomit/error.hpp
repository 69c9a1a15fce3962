#pragma once

#include <stdexcept>
#include <string>

namespace gravomit {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad configuration: parse failures, unit mismatches, invariant violations.
// The message always starts with the dotted field path when one applies.
class ConfigError : public Error {
public:
    using Error::Error;

    static ConfigError at(const std::string& path, const std::string& what) {
        return ConfigError(path.empty() ? what : path + ": " + what);
    }
};

// A physically meaningless request on otherwise valid parameters.
class DomainError : public Error {
public:
    using Error::Error;
};

// Root finding, integration or precision failure.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace gravomit
