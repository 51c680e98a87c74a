#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace survhc {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input whose values violate a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Caller passed an out-of-range argument.
class ArgumentError : public Error {
public:
    using Error::Error;
};

}  // namespace survhc
