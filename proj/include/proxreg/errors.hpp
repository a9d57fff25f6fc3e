#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace proxreg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point lies outside dom f (the value oracle returned +inf).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An optional oracle or an exact quantity was requested but is not provided.
class NotAvailable : public Error {
public:
    using Error::Error;
};

class BadShape : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// The step c violates 1/c > rho for a rho-weakly convex problem.
class StepTooLarge : public Error {
public:
    using Error::Error;
};

/// Criteria A/B reference the exact proximal point and need test mode.
class CriterionUnverifiable : public Error {
public:
    using Error::Error;
};

class NotSmooth : public Error {
public:
    using Error::Error;
};

/// Regularity estimation needs f* and a solution oracle.
class NeedsReference : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace proxreg
