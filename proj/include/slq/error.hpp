#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slq {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Parser failure. `position` is a byte offset for expression sources and a
/// 1-based line number for problem files; the message says which.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Evaluation produced a non-finite value (log of a nonpositive number,
/// division by zero, ...). Carries the evaluation point and, when raised
/// from a piecewise function, the governing segment index.
class EvalError : public Error {
public:
    EvalError(const std::string& what, double x, long segment = -1)
        : Error(what), x_(x), segment_(segment) {}
    double x() const noexcept { return x_; }
    long segment() const noexcept { return segment_; }

private:
    double x_;
    long segment_;
};

/// p(x) == 0 where the first-order system needs 1/p.
class DegeneratePointError : public Error {
public:
    explicit DegeneratePointError(double x)
        : Error("coefficient p vanishes at x = " + std::to_string(x)), x_(x) {}
    double x() const noexcept { return x_; }

private:
    double x_;
};

/// Adaptive stepper could not finish (step-size underflow near an interior
/// singularity, or the step budget ran out).
class IntegratorError : public Error {
public:
    IntegratorError(const std::string& what, double x) : Error(what), x_(x) {}
    double x() const noexcept { return x_; }

private:
    double x_;
};

/// Adaptive quadrature failed to converge within its subdivision budget.
class QuadratureError : public Error {
public:
    using Error::Error;
};

} // namespace slq
