#pragma once

#include <stdexcept>
#include <string>

namespace osv {

// Base for all toolkit errors so callers can catch the whole family.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invariant or precondition violation on domain values.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Malformed persistent input (library files, weights files).
class LoadError : public Error {
public:
    using Error::Error;
};

// Bad configuration (flags, parameter combinations).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Wire-level message boundary violations.
class FramingError : public Error {
public:
    using Error::Error;
};

// Socket and file I/O failures.
class IoError : public Error {
public:
    using Error::Error;
};

// Protocol decoder failure; carries the byte offset where parsing stopped.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

} // namespace osv
