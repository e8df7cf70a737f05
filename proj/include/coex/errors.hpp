#pragma once
#include <stdexcept>
#include <string>

namespace coex {

// Error categories surfaced through the CLI exit code.
enum class ErrorCategory { validation = 2, convergence = 3, io = 4, model = 5 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& what)
        : std::runtime_error(what), category_(cat) {}
    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

// A parameter violates a documented precondition or type invariant.
class InvalidParameter : public Error {
public:
    explicit InvalidParameter(const std::string& what)
        : Error(ErrorCategory::validation, what) {}
};

// Configuration file problems, carrying the offending field path.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field_path, const std::string& what)
        : Error(ErrorCategory::validation, field_path + ": " + what),
          field_path_(field_path) {}
    const std::string& field_path() const noexcept { return field_path_; }

private:
    std::string field_path_;
};

// Iterative solver failed to reach tolerance; carries the last residual.
class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& what, double residual)
        : Error(ErrorCategory::convergence, what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// A closed form's denominator vanished (e.g. freeze probability of 1).
class SingularModel : public Error {
public:
    explicit SingularModel(const std::string& what)
        : Error(ErrorCategory::model, what) {}
};

// A derived probability left [0,1] beyond rounding guards.
class ModelInconsistency : public Error {
public:
    explicit ModelInconsistency(const std::string& what)
        : Error(ErrorCategory::model, what) {}
};

// Offered load exceeds service capacity in the queueing extension.
class InstabilityError : public Error {
public:
    explicit InstabilityError(const std::string& what)
        : Error(ErrorCategory::model, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace coex
