#pragma once

#include <stdexcept>
#include <string>

namespace gfix {

// Base for every error the library raises. Hypothesis failures are never
// errors; they are reported as verdict content.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unknown point identifier or a point outside the space.
class LookupError : public Error {
public:
    using Error::Error;
};

// Malformed construction input or a precondition violation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Operation not available for the given kind of space (e.g. brute force on
// an analytic space).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Input file could not be parsed. Carries the file and the offending field.
class ParseError : public Error {
public:
    ParseError(std::string source, std::string field, const std::string& message)
        : Error(source + ": field '" + field + "': " + message),
          source_(std::move(source)),
          field_(std::move(field)) {}

    const std::string& source() const noexcept { return source_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string source_;
    std::string field_;
};

}  // namespace gfix
