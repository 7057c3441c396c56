#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dpt {

/// Argument outside the mathematical domain of an operation (e.g. q > Q).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Input data that fails a structural check (probabilities, power rows, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed configuration or policy file; the message names the line or field.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A precondition of a pure operation was violated by the caller.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Two policies passed to convex_combine differ on more than one state.
class HypothesisViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// The induced chain has several closed classes and no unique one could be picked.
class MultichainAmbiguity : public std::runtime_error {
public:
    MultichainAmbiguity(const std::string& msg, std::vector<std::vector<int>> classes)
        : std::runtime_error(msg), classes_(std::move(classes)) {}
    const std::vector<std::vector<int>>& classes() const { return classes_; }

private:
    std::vector<std::vector<int>> classes_;
};

/// A deterministic rate tensor is not nondecreasing in q.
class NotThresholdForm : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested power budget lies below the minimum achievable power.
class InfeasibleBudget : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative or direct solver failed to deliver a trustworthy answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Instance too large for exhaustive enumeration.
class GuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dpt
