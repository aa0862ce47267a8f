#pragma once

#include <stdexcept>
#include <string>

namespace nlheat {

/// Precondition violation by the caller (bad arguments, mismatched grids).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Rejected input: malformed config, kernel that fails verification.
/// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Explicit step requested above the stability limit.
class StabilityError : public ContractError {
public:
    StabilityError(const std::string& what, double limit)
        : ContractError(what), limit_(limit) {}
    double limit() const noexcept { return limit_; }

private:
    double limit_;
};

/// Picard iteration failed to contract.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nlheat
