#pragma once

#include <stdexcept>
#include <string>

namespace subdiff {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A trajectory left the domain of the nonlinearity (distinct from blowup).
class DomainEscapeError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Result not representable in double precision.
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

/// Implicit step has a nonpositive pivot; the step size must be reduced.
class StepSizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Linear or nonlinear solver failed to converge.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Config text could not be parsed or validated.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Machine-readable description of a failed check.
struct FailureRecord {
    std::string test_id;
    std::string expected;
    std::string got;
    std::string tolerance;
};

/// An operation refused its input and left a failure record behind.
class RecordedFailure : public std::runtime_error {
public:
    explicit RecordedFailure(FailureRecord record)
        : std::runtime_error(record.test_id + ": expected " + record.expected + ", got " + record.got),
          record_(std::move(record)) {}

    const FailureRecord& record() const noexcept { return record_; }

private:
    FailureRecord record_;
};

} // namespace subdiff
