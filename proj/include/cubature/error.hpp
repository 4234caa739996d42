#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cubature {

/// Raised when a caller breaks a documented precondition (shape mismatch,
/// negative scale, non-increasing mesh, ...).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Requested evaluation mode is not available for this object, e.g. exact
/// moment evaluation of a sampled formula.
class UnsupportedMode : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pathwise ODE integration produced a non-finite state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t segment, const std::string& what)
        : std::runtime_error(what), segment_(segment) {}

    std::size_t segment() const noexcept { return segment_; }

private:
    std::size_t segment_;
};

/// Exhaustive enumeration would exceed the configured branch budget.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(double required, double budget, const std::string& what)
        : std::runtime_error(what), required_(required), budget_(budget) {}

    double required() const noexcept { return required_; }
    double budget() const noexcept { return budget_; }

private:
    double required_;
    double budget_;
};

}  // namespace cubature
