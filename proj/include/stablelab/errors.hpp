#pragma once

#include <stdexcept>
#include <string>

namespace stablelab {

/// Argument outside the mathematical domain of an operation (z = 0, r <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A configuration or precondition check failed. Carries the module and field.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string module, std::string field, const std::string& what)
        : std::invalid_argument(module + "." + field + ": " + what),
          module_(std::move(module)), field_(std::move(field)) {}

    [[nodiscard]] const std::string& module() const noexcept { return module_; }
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string module_;
    std::string field_;
};

/// The explicit scheme would not be monotone for the requested time step.
class CflError : public std::runtime_error {
public:
    CflError(double required_dt, double given_dt)
        : std::runtime_error("CFL condition violated: dt = " + std::to_string(given_dt) +
                             " exceeds the stable limit " + std::to_string(required_dt)),
          required_dt_(required_dt) {}

    [[nodiscard]] double required_dt() const noexcept { return required_dt_; }

private:
    double required_dt_;
};

/// A numerical procedure failed to reach its tolerance or produced an invalid result.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double estimate = 0.0)
        : std::runtime_error(what), estimate_(estimate) {}

    /// Achieved error estimate or offending value, when meaningful.
    [[nodiscard]] double estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

/// The spatial grid is too narrow for the requested computation.
class GridTooNarrowError : public NumericalError {
public:
    GridTooNarrowError(const std::string& what, double influence, double suggested_half_width)
        : NumericalError(what, influence), suggested_half_width_(suggested_half_width) {}

    [[nodiscard]] double suggested_half_width() const noexcept { return suggested_half_width_; }

private:
    double suggested_half_width_;
};

}  // namespace stablelab
