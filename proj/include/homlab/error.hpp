#pragma once

#include <stdexcept>
#include <string>

namespace homlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// malformed text input
class FormatError : public Error {
public:
    FormatError(const std::string& msg, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class SignatureMismatch : public Error {
public:
    using Error::Error;
};

// an exponential construction or exhaustive search would exceed its cap
class GuardExceeded : public Error {
public:
    using Error::Error;
};

// a decision oracle accepted, but no pin leads to a solution
class OracleInconsistency : public Error {
public:
    using Error::Error;
};

}  // namespace homlab
