#pragma once

#include <stdexcept>
#include <string>

namespace bernstein {

// Argument outside the mathematical domain of an operation (negative r, κ ≤ 1, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// σ² = 0 and M = 0 together: the observable is identically zero and no rate exists.
class DegenerateObservable : public DomainError {
public:
    using DomainError::DomainError;
};

// Malformed model: nonpositive rates, bad JSON, unknown builtin.
class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A documented precondition does not hold (uncentered observable, missing measure).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Eigensolver non-convergence, overflow, singular systems.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TruncationError : public NumericError {
public:
    TruncationError(const std::string& what, long reached_n, double achieved_mass)
        : NumericError(what), reached_n_(reached_n), achieved_mass_(achieved_mass) {}
    long reached_n() const { return reached_n_; }
    double achieved_mass() const { return achieved_mass_; }

private:
    long reached_n_;
    double achieved_mass_;
};

// An operation needs data the model does not carry (e.g. ΔV for a kustr check).
class CapabilityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A sample path left the region where the model can be integrated.
class IntegrationError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace bernstein
