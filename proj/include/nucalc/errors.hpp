#pragma once

#include <stdexcept>
#include <string>

namespace nucalc {

// Base class for everything thrown by this library, so callers can write a
// single catch when they do not care which stage failed.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside the mathematical domain of the operation (nonpositive
// gamma argument, t <= 0, log of a nonpositive value, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Evaluation at a pole of the gamma function (0, -1, -2, ...).
class PoleError : public DomainError {
public:
    explicit PoleError(const std::string& msg) : DomainError(msg) {}
};

// Result magnitude exceeds double range.
class OverflowError : public DomainError {
public:
    explicit OverflowError(const std::string& msg) : DomainError(msg) {}
};

// Derivative requested at a point where the function is not differentiable
// (abs at zero).
class NonDifferentiableError : public DomainError {
public:
    explicit NonDifferentiableError(const std::string& msg) : DomainError(msg) {}
};

// A series or quadrature failed to reach the requested tolerance within its
// budget, or a limit estimate failed to settle.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

// Expression text rejected by the parser.  byte_offset points at the first
// offending byte of the input.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t byte_offset)
        : Error(msg), offset(byte_offset) {}
    std::size_t offset;
};

// The operation is only defined on part of the parameter space and was asked
// to leave it (limit-form derivative with p > 0).
class UnsupportedRegime : public Error {
public:
    explicit UnsupportedRegime(const std::string& msg) : Error(msg) {}
};

// Malformed control structure (empty epsilon schedule, zero cases, ...).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Report file could not be written.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace nucalc
