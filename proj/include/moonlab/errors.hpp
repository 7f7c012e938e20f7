#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace moonlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (u outside [0,1), p outside [0,1], ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Vector length mismatch between related inputs.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value. Carries the offending field name so front ends
/// can report errors in machine-readable form.
class ValidationError : public Error {
public:
    ValidationError(std::string field, std::string reason)
        : Error(field + ": " + reason), field_(std::move(field)), reason_(std::move(reason)) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string field_;
    std::string reason_;
};

/// Request exceeds a configured resource limit (sample count, memory).
class ResourceLimitError : public Error {
public:
    ResourceLimitError(const std::string& what, std::uint64_t limit)
        : Error(what + " (limit " + std::to_string(limit) + ")"), limit_(limit) {}

    std::uint64_t limit() const noexcept { return limit_; }

private:
    std::uint64_t limit_;
};

/// Statistic cannot be computed from the given sample (too small, degenerate).
class SampleError : public Error {
public:
    using Error::Error;
};

/// Operation not available for this distribution or model.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

}  // namespace moonlab
