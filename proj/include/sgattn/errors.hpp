#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgattn {

// Base for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Tree-text parse errors carry the byte offset of the offending input.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnbalancedBrackets : public ParseError {
public:
    using ParseError::ParseError;
};

class EmptyConstituent : public ParseError {
public:
    using ParseError::ParseError;
};

class TrailingInput : public ParseError {
public:
    using ParseError::ParseError;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class AlignmentMismatch : public Error {
public:
    using Error::Error;
};

class SentinelOverflow : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class ZeroMaskRow : public Error {
public:
    using Error::Error;
};

class NonPositiveTau : public Error {
public:
    using Error::Error;
};

} // namespace sgattn
