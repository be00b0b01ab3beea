#pragma once

#include <stdexcept>
#include <string>

namespace ssflow {

// Every library failure derives from Error. The CLI maps the category to an
// exit status: validation/precondition -> 2, solver/resource -> 3,
// numeric integrity -> 4.
enum class ErrorCategory { validation, solver, resource, integrity };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

/// Bad user input: malformed flow document, nonpositive knob, etc.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(ErrorCategory::validation, field.empty() ? what : field + ": " + what),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A documented precondition of an operation does not hold (domain error,
/// unsupported order, too-shallow continued fraction, ...).
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what)
        : Error(ErrorCategory::validation, what) {}
};

class SolverError : public Error {
public:
    explicit SolverError(const std::string& what) : Error(ErrorCategory::solver, what) {}
};

class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& what) : Error(ErrorCategory::resource, what) {}
};

/// A computed quantity violates a proven mathematical bound.
class IntegrityError : public Error {
public:
    explicit IntegrityError(const std::string& what) : Error(ErrorCategory::integrity, what) {}
};

}  // namespace ssflow
