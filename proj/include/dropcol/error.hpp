#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dropcol {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message) : std::runtime_error(message), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Malformed input file (bad header, unparsable row).
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error("parse_error", "line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A value outside its documented range.
class ValidationError : public Error {
public:
    ValidationError(std::size_t line, std::string field, const std::string& message)
        : Error("validation_error", "line " + std::to_string(line) + ": field '" + field + "' " + message),
          line_(line), field_(std::move(field)) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

/// A decision curve evaluated where its closed form is singular.
class SingularityError : public Error {
public:
    explicit SingularityError(const std::string& message) : Error("singularity", message) {}
};

/// Training could not produce a model (missing class, divergence, bad data).
class FitError : public Error {
public:
    explicit FitError(const std::string& message) : Error("fit_error", message) {}
};

/// Invalid configuration, spec or argument.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config_error", message) {}
};

} // namespace dropcol
