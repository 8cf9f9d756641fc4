#ifndef OMEPP_ERROR_HPP
#define OMEPP_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace omepp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input (grid files, JSON documents). Carries the 1-based line
/// number when one is known, 0 otherwise.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Corrupt, truncated or mismatched binary database.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace omepp

#endif // OMEPP_ERROR_HPP
